#include "robord/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "robord/inference.hpp"
#include "robord/numeric.hpp"
#include "robord/parallel.hpp"

namespace robord {
namespace {

double draw_error(ErrorDist dist, RngStream& rng) {
  switch (dist) {
    case ErrorDist::Normal:
      return link_quantile(LinkKind::Probit, rng.uniform01());
    case ErrorDist::Logistic:
      return link_quantile(LinkKind::Logit, rng.uniform01());
    case ErrorDist::Gumbel:
      return link_quantile(LinkKind::LogLog, rng.uniform01());
  }
  return 0.0;
}

Dataset draw_design(const SimScenario& scn, RngStream& rng) {
  Dataset data;
  data.n_categories = scn.n_categories();
  data.y.resize(scn.n);
  data.X.resize(scn.n, 3);
  for (int i = 0; i < scn.n; ++i) {
    const double x = rng.normal();
    const double d = rng.bernoulli(0.25) ? 1.0 : 0.0;
    const double eps = draw_error(scn.error_dist, rng);
    data.X(i, 0) = x;
    data.X(i, 1) = d;
    data.X(i, 2) = x * d;
    const double z = scn.true_beta[0] * x + scn.true_beta[1] * d +
                     scn.true_beta[2] * x * d + eps;
    data.y[i] = categorize(z, scn.true_delta);
  }
  return data;
}

// Stream roles within one replication.
constexpr std::uint64_t kRoleData = 1;
constexpr std::uint64_t kRoleValidation = 2;
constexpr std::uint64_t kRoleContamination = 3;
constexpr std::uint64_t kRoleFitBase = 0x100;

}  // namespace

const char* error_dist_name(ErrorDist d) {
  switch (d) {
    case ErrorDist::Normal:
      return "normal";
    case ErrorDist::Logistic:
      return "logistic";
    case ErrorDist::Gumbel:
      return "gumbel";
  }
  return "?";
}

ErrorDist error_dist_from_name(const std::string& name) {
  if (name == "normal") return ErrorDist::Normal;
  if (name == "logistic") return ErrorDist::Logistic;
  if (name == "gumbel") return ErrorDist::Gumbel;
  throw std::invalid_argument("unknown error distribution: '" + name +
                              "' (expected normal|logistic|gumbel)");
}

int SimScenario::n_outliers() const {
  return static_cast<int>(std::floor(outlier_frac * n + 0.5));
}

void SimScenario::validate() const {
  if (n < 1) throw std::invalid_argument("SimScenario: n >= 1");
  if (true_beta.size() != 3) {
    throw std::invalid_argument("SimScenario: true_beta must have length 3");
  }
  if (true_delta.size() < 1) {
    throw std::invalid_argument("SimScenario: true_delta must be non-empty");
  }
  for (Eigen::Index j = 1; j < true_delta.size(); ++j) {
    if (!(true_delta[j] > true_delta[j - 1])) {
      throw std::invalid_argument(
          "SimScenario: true_delta must strictly increase");
    }
  }
  if (!(outlier_frac >= 0.0 && outlier_frac < 1.0)) {
    throw std::invalid_argument("SimScenario: outlier_frac in [0,1)");
  }
  if (!(outlier_sd > 0.0)) {
    throw std::invalid_argument("SimScenario: outlier_sd > 0");
  }
  if (replications < 1) {
    throw std::invalid_argument("SimScenario: replications >= 1");
  }
}

int categorize(double z, const Eigen::VectorXd& delta) {
  int m = 1;
  while (m <= delta.size() && z > delta[m - 1]) ++m;
  return m;
}

std::pair<Dataset, Dataset> gen_dataset(const SimScenario& scn,
                                        RngStream& data_rng,
                                        RngStream& validation_rng) {
  scn.validate();
  return {draw_design(scn, data_rng), draw_design(scn, validation_rng)};
}

Dataset contaminate(const Dataset& data, double frac, double mean, double sd,
                    RngStream& rng) {
  if (!(frac >= 0.0 && frac < 1.0)) {
    throw std::invalid_argument("contaminate: frac must lie in [0,1)");
  }
  if (data.p() != 3) {
    throw std::invalid_argument(
        "contaminate: expects the (x, d, x*d) three-column design");
  }
  Dataset out = data;
  const int n = static_cast<int>(data.n());
  const int k = static_cast<int>(std::floor(frac * n + 0.5));
  if (k == 0) return out;

  // Partial Fisher-Yates draw of k distinct row indices.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int j = 0; j < k; ++j) {
    const int pick =
        j + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - j)));
    std::swap(idx[j], idx[pick]);
  }
  for (int j = 0; j < k; ++j) {
    const int i = idx[j];
    const double x_new = mean + sd * rng.normal();
    out.X(i, 0) = x_new;
    out.X(i, 2) = x_new * out.X(i, 1);
  }
  return out;
}

int predict_modal(const Params& params, LinkKind link,
                  const Eigen::VectorXd& x) {
  const Eigen::VectorXd probs = category_probs(params, link, x);
  int best = 1;
  for (int m = 2; m <= probs.size(); ++m) {
    if (probs[m - 1] > probs[best - 1]) best = m;
  }
  return best;
}

int predict_median(const Params& params, LinkKind link,
                   const Eigen::VectorXd& x) {
  const Eigen::VectorXd probs = category_probs(params, link, x);
  double cum = 0.0;
  for (int m = 1; m <= probs.size(); ++m) {
    cum += probs[m - 1];
    if (cum >= 0.5) return m;
  }
  return static_cast<int>(probs.size());
}

FitConfig make_fit_config(const SimScenario& scn, const Method& method) {
  FitConfig cfg;
  cfg.method = method;
  cfg.link = scn.link;
  cfg.seed = scn.seed;
  return cfg;
}

StudyResult run_study(
    const SimScenario& scn,
    const std::vector<std::pair<Method, FitConfig>>& methods) {
  scn.validate();
  if (methods.empty()) {
    throw std::invalid_argument("run_study: no methods given");
  }
  for (const auto& m : methods) m.first.validate();

  const int S = scn.replications;
  const std::size_t n_methods = methods.size();
  const Eigen::Index dim = scn.true_beta.size() + scn.true_delta.size();

  struct RepOutcome {
    std::vector<char> ok;
    std::vector<Eigen::VectorXd> theta;
    std::vector<double> ccr;
  };
  std::vector<RepOutcome> reps(S);

  run_indexed_tasks(static_cast<std::size_t>(S), [&](std::size_t s) {
    const std::uint64_t rep = static_cast<std::uint64_t>(s) + 1;
    RngStream data_rng(scn.seed, rep, kRoleData);
    RngStream valid_rng(scn.seed, rep, kRoleValidation);
    RngStream cont_rng(scn.seed, rep, kRoleContamination);

    auto [data, validation] = gen_dataset(scn, data_rng, valid_rng);
    if (scn.outlier_frac > 0.0) {
      data = contaminate(data, scn.outlier_frac, scn.outlier_mean,
                         scn.outlier_sd, cont_rng);
    }

    RepOutcome& out = reps[s];
    out.ok.assign(n_methods, 0);
    out.theta.assign(n_methods, Eigen::VectorXd());
    out.ccr.assign(n_methods, 0.0);
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      FitConfig cfg = methods[mi].second;
      cfg.method = methods[mi].first;
      cfg.seed = mix64(mix64(scn.seed ^ rep) ^ (kRoleFitBase + mi));
      try {
        const FitResult res = fit(data, cfg);
        out.theta[mi] = res.params.flatten();
        int correct = 0;
        for (Eigen::Index i = 0; i < validation.n(); ++i) {
          const int pred =
              scn.prediction == PredictionRule::Modal
                  ? predict_modal(res.params, cfg.link, validation.X.row(i))
                  : predict_median(res.params, cfg.link, validation.X.row(i));
          if (pred == validation.y[i]) ++correct;
        }
        out.ccr[mi] = static_cast<double>(correct) /
                      static_cast<double>(validation.n());
        out.ok[mi] = 1;
      } catch (const std::exception&) {
        out.ok[mi] = 0;
      }
    }
  });

  Eigen::VectorXd truth(dim);
  truth.head(scn.true_beta.size()) = scn.true_beta;
  truth.tail(scn.true_delta.size()) = scn.true_delta;

  StudyResult result;
  result.replications = S;
  result.parameter_names =
      param_names(scn.true_beta.size(), scn.n_categories());

  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    SimMetrics metrics;
    metrics.method_label = methods[mi].first.label();
    std::vector<NeumaierSum> bias_acc(dim), mse_acc(dim);
    NeumaierSum ccr_acc;
    int used = 0;
    for (int s = 0; s < S; ++s) {
      if (!reps[s].ok[mi]) continue;
      ++used;
      const Eigen::VectorXd& th = reps[s].theta[mi];
      for (Eigen::Index j = 0; j < dim; ++j) {
        const double e = th[j] - truth[j];
        bias_acc[j].add(e);
        mse_acc[j].add(e * e);
      }
      ccr_acc.add(reps[s].ccr[mi]);
    }
    metrics.failures = S - used;
    if (metrics.failures > 0.05 * S) {
      std::ostringstream os;
      os << "run_study: method " << metrics.method_label << " failed in "
         << metrics.failures << " of " << S
         << " replications (over the 5% budget)";
      throw ConvergenceError(os.str());
    }
    metrics.bias.resize(dim);
    metrics.mse.resize(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      metrics.bias[j] = bias_acc[j].value() / used;
      metrics.mse[j] = mse_acc[j].value() / used;
    }
    metrics.ccr = ccr_acc.value() / used;
    result.per_method.push_back(std::move(metrics));
  }
  return result;
}

void StudyResult::write_csv(std::ostream& os) const {
  os << "method,tuning,parameter,bias,mse\n";
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& m : per_method) {
    const auto colon = m.method_label.find(':');
    const std::string name = m.method_label.substr(0, colon);
    const std::string tuning =
        colon == std::string::npos ? "" : m.method_label.substr(colon + 1);
    for (std::size_t j = 0; j < parameter_names.size(); ++j) {
      os << name << ',' << tuning << ',' << parameter_names[j] << ','
         << num(m.bias[static_cast<Eigen::Index>(j)]) << ','
         << num(m.mse[static_cast<Eigen::Index>(j)]) << '\n';
    }
    os << name << ',' << tuning << ",ccr," << num(m.ccr) << ",\n";
  }
}

}  // namespace robord
