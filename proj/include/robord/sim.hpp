#ifndef ROBORD_SIM_HPP
#define ROBORD_SIM_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "robord/estimate.hpp"
#include "robord/model.hpp"
#include "robord/rng.hpp"

namespace robord {

enum class ErrorDist { Normal, Logistic, Gumbel };

const char* error_dist_name(ErrorDist d);
ErrorDist error_dist_from_name(const std::string& name);

enum class PredictionRule { Modal, Median };

/// Contamination study design: latent z = x b1 + d b2 + x d b3 + eps with
/// x ~ N(0,1), d ~ Bernoulli(0.25), binned into M = |delta|+1 categories.
/// A fraction of rows then has x replaced by N(outlier_mean, outlier_sd^2)
/// draws.
struct SimScenario {
  ErrorDist error_dist = ErrorDist::Normal;
  LinkKind link = LinkKind::Probit;  // default fitting link
  int n = 200;
  Eigen::VectorXd true_beta;
  Eigen::VectorXd true_delta;
  double outlier_frac = 0.0;
  double outlier_mean = 20.0;
  double outlier_sd = 1.0;
  int replications = 1000;
  std::uint64_t seed = 0;
  PredictionRule prediction = PredictionRule::Modal;

  int n_categories() const { return static_cast<int>(true_delta.size()) + 1; }
  int n_outliers() const;  // round(frac * n), half up
  void validate() const;
};

/// Category for latent value z under cutpoints delta (delta_0 = -inf).
int categorize(double z, const Eigen::VectorXd& delta);

/// One draw of the design: primary dataset plus an outlier-free validation
/// draw of the same size for classification scoring.
std::pair<Dataset, Dataset> gen_dataset(const SimScenario& scn,
                                        RngStream& data_rng,
                                        RngStream& validation_rng);

/// Replaces x (column 0) in round(frac*n) distinct random rows with draws
/// from N(mean, sd^2) and recomputes the interaction column; y and d keep
/// their original values.
Dataset contaminate(const Dataset& data, double frac, double mean, double sd,
                    RngStream& rng);

/// Most probable category under the fitted model; ties break low.
int predict_modal(const Params& params, LinkKind link,
                  const Eigen::VectorXd& x);

/// Smallest category whose cumulative probability reaches 1/2.
int predict_median(const Params& params, LinkKind link,
                   const Eigen::VectorXd& x);

struct SimMetrics {
  std::string method_label;
  Eigen::VectorXd bias;  // per parameter, beta block then delta block
  Eigen::VectorXd mse;
  double ccr = 0.0;
  int failures = 0;
};

struct StudyResult {
  std::vector<SimMetrics> per_method;
  std::vector<std::string> parameter_names;
  int replications = 0;

  /// columns: method,tuning,parameter,bias,mse — one trailing ccr row per
  /// method (value in the bias column).
  void write_csv(std::ostream& os) const;
};

/// Full replication loop: generate, contaminate, fit every method, score CCR
/// on the validation draw, and aggregate bias / MSE / CCR. Per-replication
/// RNG streams derive from (seed, replication, role), so results do not
/// depend on execution order; replications run concurrently when a thread
/// budget is available. Replications whose fit fails are excluded and
/// counted; more than 5% failures aborts.
StudyResult run_study(const SimScenario& scn,
                      const std::vector<std::pair<Method, FitConfig>>& methods);

/// Convenience builder: FitConfig for this scenario's link with defaults.
FitConfig make_fit_config(const SimScenario& scn, const Method& method);

}  // namespace robord

#endif  // ROBORD_SIM_HPP
