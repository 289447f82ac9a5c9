#ifndef ROBORD_RESIDUALS_HPP
#define ROBORD_RESIDUALS_HPP

#include <iosfwd>
#include <utility>
#include <vector>

#include "robord/estimate.hpp"
#include "robord/model.hpp"

namespace robord {

struct ResidualReport {
  Eigen::VectorXd residuals;
  double lo95 = 0.0, hi95 = 0.0;  // empirical 2.5 / 97.5 percentiles
  double lo99 = 0.0, hi99 = 0.0;  // empirical 0.5 / 99.5 percentiles
  std::vector<Eigen::Index> flagged;  // rows outside the 95% band

  void write_csv(std::ostream& os) const;
};

/// Generalized residuals: the conditional mean of the latent error given the
/// observed category under the fitted model,
///   r_i = [g(a_i) - g(b_i)] / [G(b_i) - G(a_i)],
/// a_i = delta_{y_i-1} - x_i'beta, b_i = delta_{y_i} - x_i'beta (exact for
/// probit; plug-in form for the other links). Bands are empirical quantiles
/// (type-7 interpolation) of the residuals.
ResidualReport generalized_residuals(const FitResult& fit,
                                     const Dataset& data);

/// Mean squared parameter displacement between two fits, reported separately
/// for coefficients and cutpoints: (|b_a - b_b|^2 / p, |d_a - d_b|^2 / (M-1)).
std::pair<double, double> params_distance(const Params& a, const Params& b);

/// Empirical quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> values, double prob);

}  // namespace robord

#endif  // ROBORD_RESIDUALS_HPP
