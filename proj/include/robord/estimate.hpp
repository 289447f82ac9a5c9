#ifndef ROBORD_ESTIMATE_HPP
#define ROBORD_ESTIMATE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "robord/model.hpp"

namespace robord {

/// Cutpoints in the unconstrained space: delta_1 is free, subsequent
/// increments enter squared, so every point maps to a nondecreasing delta.
struct UnconstrainedParams {
  Eigen::VectorXd beta;
  Eigen::VectorXd delta_tilde;

  Eigen::VectorXd flatten() const;
  static UnconstrainedParams unflatten(const Eigen::VectorXd& v,
                                       Eigen::Index p);
};

/// delta_1 = dt_1; delta_m = dt_1 + sum_{j=2..m} dt_j^2. Zero increments give
/// tied cutpoints; downstream Params::validate rejects them, but objective
/// evaluation stays finite (the squeezed category just has mass zero).
Params to_constrained(const UnconstrainedParams& u);

/// Inverse map; throws DataError unless delta strictly increases.
UnconstrainedParams from_constrained(const Params& p);

/// beta = 0 and cutpoints at link quantiles of the cumulative category
/// frequencies. Throws DataError naming any category absent from y.
Params init_params(const Dataset& data, LinkKind link);

struct FitConfig {
  Method method;
  LinkKind link = LinkKind::Probit;
  int max_iters = 20000;
  double obj_tol = 1e-10;
  // Contaminated divergence objectives are bimodal: the corrupted basin sits
  // near beta = 0 where the optimizer starts. Eight jittered restarts push
  // the chance of every run missing the deeper robust basin below ~0.5%.
  int n_restarts = 8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FitResult {
  Params params;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  Method method;
  LinkKind link = LinkKind::Probit;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double fx = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Derivative-free simplex minimizer. Stops when the simplex objective
/// spread drops below obj_tol or after max_iters iterations. If trace is
/// non-null it receives the best objective value after each iteration.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, double obj_tol,
                             int max_iters,
                             std::vector<double>* trace = nullptr);

/// Minimizes the configured objective over the unconstrained parameter
/// space, starting from init_params plus (for restarts > 0) deterministically
/// jittered copies; returns the best run.
FitResult fit(const Dataset& data, const FitConfig& cfg);

/// Objective value for the configured method at given parameters.
double objective_value(const Params& params, const FitConfig& cfg,
                       const Dataset& data);

}  // namespace robord

#endif  // ROBORD_ESTIMATE_HPP
