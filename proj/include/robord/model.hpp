#ifndef ROBORD_MODEL_HPP
#define ROBORD_MODEL_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

#include "robord/links.hpp"

namespace robord {

/// Raised for malformed inputs (data files, specs, degenerate datasets).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an optimizer or covariance computation cannot proceed.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Ordinal responses y in {1..M} plus an n-by-p covariate matrix with no
/// intercept column (the latent model is identified without one).
struct Dataset {
  Eigen::VectorXi y;
  Eigen::MatrixXd X;
  int n_categories = 0;

  Eigen::Index n() const { return y.size(); }
  Eigen::Index p() const { return X.cols(); }

  /// Throws DataError on shape mismatch, out-of-range y, or non-finite X.
  void validate() const;
};

/// Coefficients beta (length p) and strictly increasing interior cutpoints
/// delta (length M-1); delta_0 = -inf and delta_M = +inf are implicit.
struct Params {
  Eigen::VectorXd beta;
  Eigen::VectorXd delta;

  Eigen::Index n_categories() const { return delta.size() + 1; }
  Eigen::Index dim() const { return beta.size() + delta.size(); }

  /// Packs (beta, delta) into one vector, beta block first.
  Eigen::VectorXd flatten() const;
  static Params unflatten(const Eigen::VectorXd& v, Eigen::Index p);

  void validate() const;  // throws DataError unless delta strictly increases
};

/// Estimation objective: maximum likelihood, density-power divergence with
/// tuning alpha, or gamma-divergence with tuning gamma (both in (0,1]).
struct Method {
  enum class Kind { ML, DP, Gamma };
  Kind kind = Kind::ML;
  double tuning = 0.0;

  static Method ml() { return {Kind::ML, 0.0}; }
  static Method dp(double alpha) { return {Kind::DP, alpha}; }
  static Method gamma(double g) { return {Kind::Gamma, g}; }

  void validate() const;
  std::string label() const;  // "ml", "dp:0.3", "gamma:0.5"
};

/// Probabilities are clipped here before logs and ratios; optimizers visit
/// parameter values where categories collapse to zero mass.
constexpr double kProbFloor = 1e-12;

/// P(y = m | x) = G(delta_m - x'beta) - G(delta_{m-1} - x'beta), clamped at 0.
/// m is 1-based; throws std::invalid_argument outside 1..M.
double category_prob(const Params& params, LinkKind link,
                     const Eigen::VectorXd& x, int m);

/// All M category probabilities at once (no clamping beyond max(.,0)).
Eigen::VectorXd category_probs(const Params& params, LinkKind link,
                               const Eigen::VectorXd& x);

/// -sum_i log max(p_i, 1e-12).
double neg_log_lik(const Params& params, LinkKind link, const Dataset& data);

/// Empirical density-power cross entropy
///   -(1/alpha) (1/n) sum_i p_i^alpha
///   + (1/(1+alpha)) (1/n) sum_i sum_m p_im^{1+alpha}.
/// Powers use the exact probabilities (0^a = 0), so a gross outlier's
/// contribution vanishes rather than saturating at the floor.
double dp_objective(const Params& params, LinkKind link, const Dataset& data,
                    double alpha);

/// Empirical gamma cross entropy
///   -(1/gamma) log[(1/n) sum_i p_i^gamma]
///   + (1/(1+gamma)) log[(1/n) sum_i sum_m p_im^{1+gamma}].
double gamma_objective(const Params& params, LinkKind link,
                       const Dataset& data, double gamma);

/// Gradient of log f(y|x;theta), beta block then delta block. The density
/// ratio is evaluated in log space so the score stays faithful far into the
/// tails (where the observed-category probability underflows).
Eigen::VectorXd score(const Params& params, LinkKind link,
                      const Eigen::VectorXd& x, int y);

}  // namespace robord

#endif  // ROBORD_MODEL_HPP
