#include "robord/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "robord/numeric.hpp"

namespace robord {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// delta_m - eta with the implicit boundaries delta_0 = -inf, delta_M = +inf.
double boundary(const Eigen::VectorXd& delta, int m, double eta) {
  const int M = static_cast<int>(delta.size()) + 1;
  if (m <= 0) return -kInf;
  if (m >= M) return kInf;
  return delta[m - 1] - eta;
}

// log P(y in (a, b]) for boundary arguments a < b, evaluated in log space.
// Picks the lower-tail or survival form to avoid cancellation near 0 or 1.
double log_interval_prob(LinkKind link, double a, double b) {
  if (a == -kInf) return link_log_cdf(link, b);
  if (b == kInf) return link_log_survival(link, a);
  const double lcb = link_log_cdf(link, b);
  if (lcb < -0.6931471805599453) {  // G(b) < 1/2: lower tail
    const double lca = link_log_cdf(link, a);
    return lcb + std::log1p(-std::exp(lca - lcb));
  }
  const double lsa = link_log_survival(link, a);
  const double lsb = link_log_survival(link, b);
  return lsa + std::log1p(-std::exp(lsb - lsa));
}

}  // namespace

void Dataset::validate() const {
  if (n_categories < 2) throw DataError("Dataset: need at least 2 categories");
  if (y.size() < 1) throw DataError("Dataset: empty response vector");
  if (X.rows() != y.size()) {
    std::ostringstream os;
    os << "Dataset: X has " << X.rows() << " rows but y has " << y.size();
    throw DataError(os.str());
  }
  if (X.cols() < 1) throw DataError("Dataset: X needs at least one column");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] < 1 || y[i] > n_categories) {
      std::ostringstream os;
      os << "Dataset: y[" << i << "] = " << y[i] << " outside 1.."
         << n_categories;
      throw DataError(os.str());
    }
  }
  if (!X.allFinite()) throw DataError("Dataset: X contains non-finite values");
}

Eigen::VectorXd Params::flatten() const {
  Eigen::VectorXd v(dim());
  v.head(beta.size()) = beta;
  v.tail(delta.size()) = delta;
  return v;
}

Params Params::unflatten(const Eigen::VectorXd& v, Eigen::Index p) {
  Params out;
  out.beta = v.head(p);
  out.delta = v.tail(v.size() - p);
  return out;
}

void Params::validate() const {
  if (delta.size() < 1) throw DataError("Params: delta must be non-empty");
  for (Eigen::Index j = 1; j < delta.size(); ++j) {
    if (!(delta[j] > delta[j - 1])) {
      std::ostringstream os;
      os << "Params: cutpoints must strictly increase (delta[" << j
         << "] = " << delta[j] << " <= delta[" << j - 1
         << "] = " << delta[j - 1] << ")";
      throw DataError(os.str());
    }
  }
  if (!beta.allFinite() || !delta.allFinite()) {
    throw DataError("Params: non-finite parameter value");
  }
}

void Method::validate() const {
  if (kind != Kind::ML && !(tuning > 0.0 && tuning <= 1.0)) {
    throw std::invalid_argument(
        "Method: tuning parameter must lie in (0, 1]");
  }
}

std::string Method::label() const {
  if (kind == Kind::ML) return "ml";
  std::ostringstream os;
  os << (kind == Kind::DP ? "dp:" : "gamma:") << tuning;
  return os.str();
}

double category_prob(const Params& params, LinkKind link,
                     const Eigen::VectorXd& x, int m) {
  const int M = static_cast<int>(params.n_categories());
  if (m < 1 || m > M) {
    std::ostringstream os;
    os << "category_prob: m = " << m << " outside 1.." << M;
    throw std::invalid_argument(os.str());
  }
  const double eta = x.dot(params.beta);
  const double a = boundary(params.delta, m - 1, eta);
  const double b = boundary(params.delta, m, eta);
  // CDF differences lose relative precision once both ends sit near 1, so
  // the upper tail is evaluated through the survival function instead.
  const double gb = link_cdf(link, b);
  const double p = (gb <= 0.5) ? gb - link_cdf(link, a)
                               : link_survival(link, a) - link_survival(link, b);
  return p > 0.0 ? p : 0.0;
}

Eigen::VectorXd category_probs(const Params& params, LinkKind link,
                               const Eigen::VectorXd& x) {
  const int M = static_cast<int>(params.n_categories());
  const double eta = x.dot(params.beta);
  Eigen::VectorXd probs(M);
  double prev_cdf = 0.0;
  double prev_sf = 1.0;
  bool upper = false;  // boundaries ascend; switch branch past the median
  for (int m = 1; m <= M; ++m) {
    const double u = boundary(params.delta, m, eta);
    double p;
    if (!upper) {
      const double g = link_cdf(link, u);
      p = g - prev_cdf;
      if (g > 0.5) {
        upper = true;
        prev_sf = link_survival(link, u);
      } else {
        prev_cdf = g;
      }
    } else {
      const double s = link_survival(link, u);
      p = prev_sf - s;
      prev_sf = s;
    }
    probs[m - 1] = p > 0.0 ? p : 0.0;
  }
  return probs;
}

double neg_log_lik(const Params& params, LinkKind link, const Dataset& data) {
  NeumaierSum acc;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double p = category_prob(params, link, data.X.row(i), data.y[i]);
    acc.add(-std::log(std::max(p, kProbFloor)));
  }
  return acc.value();
}

double dp_objective(const Params& params, LinkKind link, const Dataset& data,
                    double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("dp_objective: alpha must be positive");
  }
  const double n = static_cast<double>(data.n());
  NeumaierSum fit_term, bulk_term;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const Eigen::VectorXd probs = category_probs(params, link, data.X.row(i));
    fit_term.add(pow_or_zero(probs[data.y[i] - 1], alpha));
    for (Eigen::Index m = 0; m < probs.size(); ++m) {
      bulk_term.add(pow_or_zero(probs[m], 1.0 + alpha));
    }
  }
  return -fit_term.value() / (alpha * n) +
         bulk_term.value() / ((1.0 + alpha) * n);
}

double gamma_objective(const Params& params, LinkKind link,
                       const Dataset& data, double gamma) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("gamma_objective: gamma must be positive");
  }
  const double n = static_cast<double>(data.n());
  NeumaierSum fit_term, bulk_term;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const Eigen::VectorXd probs = category_probs(params, link, data.X.row(i));
    fit_term.add(pow_or_zero(probs[data.y[i] - 1], gamma));
    for (Eigen::Index m = 0; m < probs.size(); ++m) {
      bulk_term.add(pow_or_zero(probs[m], 1.0 + gamma));
    }
  }
  // Guard keeps the objective finite if every observed category has mass 0.
  const double fit_mean = std::max(fit_term.value() / n, 1e-300);
  return -std::log(fit_mean) / gamma +
         std::log(bulk_term.value() / n) / (1.0 + gamma);
}

Eigen::VectorXd score(const Params& params, LinkKind link,
                      const Eigen::VectorXd& x, int y) {
  const int M = static_cast<int>(params.n_categories());
  const Eigen::Index p = params.beta.size();
  if (y < 1 || y > M) {
    std::ostringstream os;
    os << "score: y = " << y << " outside 1.." << M;
    throw std::invalid_argument(os.str());
  }
  const double eta = x.dot(params.beta);
  const double a = boundary(params.delta, y - 1, eta);
  const double b = boundary(params.delta, y, eta);
  const double lp = log_interval_prob(link, a, b);

  Eigen::VectorXd s = Eigen::VectorXd::Zero(p + M - 1);
  if (lp == -kInf) return s;  // probability below double range entirely

  const double lga = link_log_pdf(link, a);
  const double lgb = link_log_pdf(link, b);
  const double mx = std::max(lga, lgb);
  if (mx != -kInf) {
    const double diff = std::exp(lgb - mx) - std::exp(lga - mx);
    s.head(p) = -diff * std::exp(mx - lp) * x;
  }
  if (y <= M - 1) s[p + y - 1] = std::exp(lgb - lp);
  if (y >= 2) s[p + y - 2] = -std::exp(lga - lp);
  return s;
}

}  // namespace robord
