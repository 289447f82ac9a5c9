#ifndef ROBORD_INFERENCE_HPP
#define ROBORD_INFERENCE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "robord/estimate.hpp"
#include "robord/model.hpp"

namespace robord {

/// Estimating-function value psi(y|x; theta) for one observation, beta block
/// then delta block. ML returns the score itself; DP and gamma apply the
/// density-power weights with the conditional-expectation centering expanded
/// over the M categories.
Eigen::VectorXd psi(const Method& method, const Params& params, LinkKind link,
                    const Eigen::VectorXd& x, int y);

/// "beta1..betap, delta1..deltaM-1".
std::vector<std::string> param_names(Eigen::Index p, Eigen::Index M);

struct SandwichCov {
  Eigen::MatrixXd M_hat;  // -(1/n) sum_i d psi_i / d theta (finite differences)
  Eigen::MatrixXd Q_hat;  // (1/n) sum_i psi_i psi_i'
  Eigen::MatrixXd V_hat;  // M^-1 Q M^-1
  double info_equality_gap = -1.0;  // ML only: max-norm of M - Q, else -1
};

/// Plug-in sandwich covariance at the fitted parameters. fd_step scales the
/// central-difference step per coordinate (step = fd_step * max(1,|theta_j|)).
/// Throws ConvergenceError if the fit did not converge, DataError if n is too
/// small or M_hat is numerically singular (condition number > 1e12).
SandwichCov sandwich(const Method& method, const FitResult& fit,
                     const Dataset& data, double fd_step = 1e-5);

struct WaldRow {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double p_value = 0.0;
};

struct WaldResult {
  std::vector<WaldRow> coefficients;
};

/// Per-coefficient z = beta_k / sqrt(V_kk / n) and two-sided normal p-value.
WaldResult wald(const FitResult& fit, const SandwichCov& cov,
                const Dataset& data);

struct InfluenceProfile {
  Eigen::VectorXd grid;
  Eigen::MatrixXd values;  // grid.size() x (p + M - 1)
  std::vector<std::string> parameter;
  Method method;
  LinkKind link = LinkKind::Probit;
  int y = 1;

  void write_csv(std::ostream& os) const;  // columns: x,parameter,method,psi
};

/// psi swept along one covariate axis (the others held at zero), for plotting
/// influence curves and for the boundedness/redescendence checks.
InfluenceProfile influence_profile(const Method& method, const Params& params,
                                   LinkKind link, int y,
                                   const Eigen::VectorXd& grid, int covariate);

enum class TailTrend { DecaysToZero, ConvergesToConstant, Diverges };

const char* tail_trend_name(TailTrend t);

struct TailSequence {
  std::vector<double> u;      // grid, ascending magnitude
  std::vector<double> value;  // quantity along the grid
  TailTrend trend = TailTrend::ConvergesToConstant;
};

/// Numeric probe of the link-tail quantities that govern influence
/// behavior: |u dlog g/du| (ML beta-influence bounded iff its limit is
/// finite), |dlog g/du| (same for the cutpoints), and g(u)^alpha |u|
/// (DP/gamma influence bounded and redescendent when it tends to zero).
struct ConditionProbe {
  LinkKind link = LinkKind::Probit;
  double alpha = 0.3;
  TailSequence beta_pos, beta_neg;      // |u dlog g|
  TailSequence delta_pos, delta_neg;    // |dlog g|
  TailSequence redesc_pos, redesc_neg;  // g^alpha |u|
  bool ml_beta_bounded = false;
  bool ml_delta_bounded = false;
  bool divergence_redescendent = false;

  std::string summary() const;
  void write_csv(std::ostream& os) const;  // columns: quantity,u,value
};

ConditionProbe condition_probe(LinkKind link, double alpha,
                               double u_max = 30.0);

/// g(u)^alpha * u at a single point; the divergence-based influence is
/// bounded and redescendent exactly when this tends to zero in both tails.
double redescendence_statistic(LinkKind link, double alpha, double u);

/// d log g(u) / du by central finite difference of the log density.
double log_density_slope(LinkKind link, double u);

}  // namespace robord

#endif  // ROBORD_INFERENCE_HPP
