#include "robord/inference.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "robord/parallel.hpp"

namespace robord {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-observation category geometry at one covariate point: boundary pdf
// values g_0..g_M (zero at the infinite ends) and floored category masses.
struct CategoryTerms {
  Eigen::VectorXd g;        // M+1 boundary densities
  Eigen::VectorXd p;        // M category probabilities, clamped at 0
  Eigen::VectorXd p_floor;  // max(p, kProbFloor)
};

CategoryTerms category_terms(const Params& params, LinkKind link,
                             const Eigen::VectorXd& x) {
  const int M = static_cast<int>(params.n_categories());
  const double eta = x.dot(params.beta);
  CategoryTerms t;
  t.g.setZero(M + 1);
  for (int m = 1; m < M; ++m) {
    t.g[m] = link_pdf(link, params.delta[m - 1] - eta);
  }
  t.p = category_probs(params, link, x);
  t.p_floor = t.p.cwiseMax(kProbFloor);
  return t;
}

Eigen::VectorXd psi_dp(const Params& params, LinkKind link,
                       const Eigen::VectorXd& x, int y, double alpha) {
  const int M = static_cast<int>(params.n_categories());
  const Eigen::Index p = params.beta.size();
  const CategoryTerms t = category_terms(params, link, x);

  const double pow_y_m1 = std::pow(t.p_floor[y - 1], alpha - 1.0);
  Eigen::VectorXd pow_a(M);
  for (int m = 0; m < M; ++m) pow_a[m] = std::pow(t.p_floor[m], alpha);

  Eigen::VectorXd out = Eigen::VectorXd::Zero(p + M - 1);
  double beta_coef = -(t.g[y] - t.g[y - 1]) * pow_y_m1;
  for (int m = 1; m <= M; ++m) {
    beta_coef += (t.g[m] - t.g[m - 1]) * pow_a[m - 1];
  }
  out.head(p) = beta_coef * x;

  for (int l = 1; l <= M - 1; ++l) {
    const int ind = (y == l) ? 1 : (y == l + 1 ? -1 : 0);
    double v = -t.g[l] * (pow_a[l - 1] - pow_a[l]);
    if (ind != 0) v += t.g[l] * pow_y_m1 * ind;
    out[p + l - 1] = v;
  }
  return out;
}

Eigen::VectorXd psi_gamma(const Params& params, LinkKind link,
                          const Eigen::VectorXd& x, int y, double gamma) {
  const int M = static_cast<int>(params.n_categories());
  const Eigen::Index p = params.beta.size();
  const CategoryTerms t = category_terms(params, link, x);

  Eigen::VectorXd pow_g(M);
  double bulk = 0.0;  // sum_m p_m^{1+gamma}
  for (int m = 0; m < M; ++m) {
    pow_g[m] = std::pow(t.p_floor[m], gamma);
    bulk += pow_g[m] * t.p_floor[m];
  }
  const double pow_y_m1 = std::pow(t.p_floor[y - 1], gamma - 1.0);
  const double pow_y = pow_g[y - 1];

  Eigen::VectorXd out = Eigen::VectorXd::Zero(p + M - 1);
  double cross = 0.0;  // sum_m (g_m - g_{m-1}) p_m^gamma
  for (int m = 1; m <= M; ++m) {
    cross += (t.g[m] - t.g[m - 1]) * pow_g[m - 1];
  }
  out.head(p) =
      (-bulk * (t.g[y] - t.g[y - 1]) * pow_y_m1 + pow_y * cross) * x;

  for (int l = 1; l <= M - 1; ++l) {
    const int ind = (y == l) ? 1 : (y == l + 1 ? -1 : 0);
    double v = -t.g[l] * pow_y * (pow_g[l - 1] - pow_g[l]);
    if (ind != 0) v += bulk * t.g[l] * pow_y_m1 * ind;
    out[p + l - 1] = v;
  }
  return out;
}

TailTrend classify_tail(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  const int window = std::min(5, n);
  std::vector<double> mag(window);
  for (int j = 0; j < window; ++j) {
    mag[j] = std::fabs(values[n - window + j]);
  }
  bool all_tiny = true;
  for (double m : mag) all_tiny = all_tiny && m < 1e-290;
  if (all_tiny) return TailTrend::DecaysToZero;

  bool shrinking = true, growing = true, flat = true;
  for (int j = 0; j + 1 < window; ++j) {
    if (mag[j] == 0.0) return TailTrend::DecaysToZero;
    const double r = mag[j + 1] / mag[j];
    shrinking = shrinking && r < 0.995;
    growing = growing && r > 1.005;
    flat = flat && r >= 0.995 && r <= 1.005;
  }
  if (shrinking) return TailTrend::DecaysToZero;
  if (growing) return TailTrend::Diverges;
  if (flat) return TailTrend::ConvergesToConstant;
  const double span = mag.back() / mag.front();
  if (span < 0.8) return TailTrend::DecaysToZero;
  if (span > 1.25) return TailTrend::Diverges;
  return TailTrend::ConvergesToConstant;
}

}  // namespace

Eigen::VectorXd psi(const Method& method, const Params& params, LinkKind link,
                    const Eigen::VectorXd& x, int y) {
  method.validate();
  const int M = static_cast<int>(params.n_categories());
  if (y < 1 || y > M) {
    std::ostringstream os;
    os << "psi: y = " << y << " outside 1.." << M;
    throw std::invalid_argument(os.str());
  }
  switch (method.kind) {
    case Method::Kind::ML:
      return score(params, link, x, y);
    case Method::Kind::DP:
      return psi_dp(params, link, x, y, method.tuning);
    case Method::Kind::Gamma:
      return psi_gamma(params, link, x, y, method.tuning);
  }
  return Eigen::VectorXd();
}

std::vector<std::string> param_names(Eigen::Index p, Eigen::Index M) {
  std::vector<std::string> names;
  names.reserve(p + M - 1);
  for (Eigen::Index k = 1; k <= p; ++k) {
    names.push_back("beta" + std::to_string(k));
  }
  for (Eigen::Index l = 1; l <= M - 1; ++l) {
    names.push_back("delta" + std::to_string(l));
  }
  return names;
}

SandwichCov sandwich(const Method& method, const FitResult& fit,
                     const Dataset& data, double fd_step) {
  if (!fit.converged) {
    throw ConvergenceError("sandwich: fit did not converge");
  }
  data.validate();
  const Eigen::Index d = fit.params.dim();
  const Eigen::Index n = data.n();
  if (n <= d) {
    throw DataError("sandwich: need more observations than parameters");
  }
  const Eigen::VectorXd theta = fit.params.flatten();
  const Eigen::Index p = fit.params.beta.size();

  // Row sums accumulate per fixed 256-row block; blocks combine in index
  // order, so the result is independent of the worker count.
  const Eigen::Index block = 256;
  const std::size_t n_blocks = static_cast<std::size_t>((n + block - 1) / block);

  const auto psi_sum_at = [&](const Eigen::VectorXd& th) {
    const Params pars = Params::unflatten(th, p);
    std::vector<Eigen::VectorXd> partial(n_blocks,
                                         Eigen::VectorXd::Zero(d));
    run_indexed_tasks(n_blocks, [&](std::size_t bi) {
      const Eigen::Index lo = static_cast<Eigen::Index>(bi) * block;
      const Eigen::Index hi = std::min(n, lo + block);
      for (Eigen::Index i = lo; i < hi; ++i) {
        partial[bi] += psi(method, pars, fit.link, data.X.row(i), data.y[i]);
      }
    });
    Eigen::VectorXd total = Eigen::VectorXd::Zero(d);
    for (const auto& part : partial) total += part;
    return total;
  };

  SandwichCov out;

  // Q_hat
  {
    std::vector<Eigen::MatrixXd> partial(n_blocks,
                                         Eigen::MatrixXd::Zero(d, d));
    run_indexed_tasks(n_blocks, [&](std::size_t bi) {
      const Eigen::Index lo = static_cast<Eigen::Index>(bi) * block;
      const Eigen::Index hi = std::min(n, lo + block);
      for (Eigen::Index i = lo; i < hi; ++i) {
        const Eigen::VectorXd v =
            psi(method, fit.params, fit.link, data.X.row(i), data.y[i]);
        partial[bi] += v * v.transpose();
      }
    });
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(d, d);
    for (const auto& part : partial) q += part;
    out.Q_hat = q / static_cast<double>(n);
  }

  // M_hat by central differences of the summed psi.
  {
    Eigen::MatrixXd jac(d, d);
    std::vector<Eigen::VectorXd> plus(d), minus(d);
    run_indexed_tasks(static_cast<std::size_t>(2 * d), [&](std::size_t k) {
      const Eigen::Index j = static_cast<Eigen::Index>(k / 2);
      const double h = fd_step * std::max(1.0, std::fabs(theta[j]));
      Eigen::VectorXd th = theta;
      if (k % 2 == 0) {
        th[j] += h;
        plus[j] = psi_sum_at(th);
      } else {
        th[j] -= h;
        minus[j] = psi_sum_at(th);
      }
    }, 1);  // inner psi_sum_at already parallelizes
    for (Eigen::Index j = 0; j < d; ++j) {
      const double h = fd_step * std::max(1.0, std::fabs(theta[j]));
      jac.col(j) = (plus[j] - minus[j]) / (2.0 * h);
    }
    out.M_hat = -jac / static_cast<double>(n);
  }

  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.M_hat);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(d - 1);
    if (!(smin > 0.0) || smax / smin > 1e12) {
      throw DataError(
          "sandwich: M_hat is numerically singular; use more data or a "
          "smaller model");
    }
  }
  const Eigen::MatrixXd m_inv = out.M_hat.inverse();
  out.V_hat = m_inv * out.Q_hat * m_inv;

  if (method.kind == Method::Kind::ML) {
    out.info_equality_gap =
        (out.M_hat - out.Q_hat).cwiseAbs().maxCoeff();
  }
  return out;
}

WaldResult wald(const FitResult& fit, const SandwichCov& cov,
                const Dataset& data) {
  const Eigen::Index p = fit.params.beta.size();
  const double n = static_cast<double>(data.n());
  const std::vector<std::string> names =
      param_names(p, fit.params.n_categories());
  WaldResult out;
  for (Eigen::Index k = 0; k < p; ++k) {
    WaldRow row;
    row.name = names[k];
    row.estimate = fit.params.beta[k];
    const double var_k = cov.V_hat(k, k);
    row.std_error = var_k > 0.0 ? std::sqrt(var_k / n) : 0.0;
    if (row.std_error == 0.0) {
      throw DataError("wald: zero standard error for " + row.name);
    }
    row.z = row.estimate / row.std_error;
    row.p_value =
        2.0 * std::exp(link_log_survival(LinkKind::Probit, std::fabs(row.z)));
    if (row.p_value > 1.0) row.p_value = 1.0;
    out.coefficients.push_back(row);
  }
  return out;
}

void InfluenceProfile::write_csv(std::ostream& os) const {
  os << "x,parameter,method,psi\n";
  char buf[64];
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", grid[i]);
      os << buf << ',' << parameter[j] << ',' << method.label() << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", values(i, j));
      os << buf << '\n';
    }
  }
}

InfluenceProfile influence_profile(const Method& method, const Params& params,
                                   LinkKind link, int y,
                                   const Eigen::VectorXd& grid,
                                   int covariate) {
  const Eigen::Index p = params.beta.size();
  if (covariate < 0 || covariate >= p) {
    throw std::invalid_argument("influence_profile: covariate index out of range");
  }
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw std::invalid_argument(
          "influence_profile: grid must be finite and strictly increasing");
    }
  }
  InfluenceProfile out;
  out.grid = grid;
  out.method = method;
  out.link = link;
  out.y = y;
  out.parameter = param_names(p, params.n_categories());
  out.values.resize(grid.size(), params.dim());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    x[covariate] = grid[i];
    out.values.row(i) = psi(method, params, link, x, y);
  }
  return out;
}

const char* tail_trend_name(TailTrend t) {
  switch (t) {
    case TailTrend::DecaysToZero:
      return "decays to zero";
    case TailTrend::ConvergesToConstant:
      return "converges to a constant";
    case TailTrend::Diverges:
      return "diverges";
  }
  return "?";
}

double redescendence_statistic(LinkKind link, double alpha, double u) {
  return std::exp(alpha * link_log_pdf(link, u)) * u;
}

double log_density_slope(LinkKind link, double u) {
  const double h = 1e-5 * std::max(1.0, std::fabs(u));
  return (link_log_pdf(link, u + h) - link_log_pdf(link, u - h)) / (2.0 * h);
}

ConditionProbe condition_probe(LinkKind link, double alpha, double u_max) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("condition_probe: alpha must lie in (0,1]");
  }
  if (!(u_max > 1.0)) {
    throw std::invalid_argument("condition_probe: u_max must exceed 1");
  }
  ConditionProbe out;
  out.link = link;
  out.alpha = alpha;

  const int n_pts = 33;
  const double u0 = 0.5;
  for (int side = 0; side < 2; ++side) {
    TailSequence beta_seq, delta_seq, redesc_seq;
    for (int j = 0; j < n_pts; ++j) {
      const double mag =
          u0 * std::pow(u_max / u0, static_cast<double>(j) / (n_pts - 1));
      const double u = side == 0 ? mag : -mag;
      const double slope = log_density_slope(link, u);
      beta_seq.u.push_back(u);
      beta_seq.value.push_back(std::fabs(u * slope));
      delta_seq.u.push_back(u);
      delta_seq.value.push_back(std::fabs(slope));
      redesc_seq.u.push_back(u);
      redesc_seq.value.push_back(
          std::fabs(redescendence_statistic(link, alpha, u)));
    }
    beta_seq.trend = classify_tail(beta_seq.value);
    delta_seq.trend = classify_tail(delta_seq.value);
    redesc_seq.trend = classify_tail(redesc_seq.value);
    if (side == 0) {
      out.beta_pos = beta_seq;
      out.delta_pos = delta_seq;
      out.redesc_pos = redesc_seq;
    } else {
      out.beta_neg = beta_seq;
      out.delta_neg = delta_seq;
      out.redesc_neg = redesc_seq;
    }
  }

  out.ml_beta_bounded = out.beta_pos.trend != TailTrend::Diverges &&
                        out.beta_neg.trend != TailTrend::Diverges;
  out.ml_delta_bounded = out.delta_pos.trend != TailTrend::Diverges &&
                         out.delta_neg.trend != TailTrend::Diverges;
  out.divergence_redescendent =
      out.redesc_pos.trend == TailTrend::DecaysToZero &&
      out.redesc_neg.trend == TailTrend::DecaysToZero;
  return out;
}

std::string ConditionProbe::summary() const {
  std::ostringstream os;
  os << "link=" << link_name(link) << " alpha=" << alpha << "\n";
  os << "  |u dlog g/du|: +" << tail_trend_name(beta_pos.trend) << ", -"
     << tail_trend_name(beta_neg.trend) << " -> ML beta influence "
     << (ml_beta_bounded ? "bounded" : "unbounded") << "\n";
  os << "  |dlog g/du|:   +" << tail_trend_name(delta_pos.trend) << ", -"
     << tail_trend_name(delta_neg.trend) << " -> ML delta influence "
     << (ml_delta_bounded ? "bounded" : "unbounded") << "\n";
  os << "  g(u)^a |u|:    +" << tail_trend_name(redesc_pos.trend) << ", -"
     << tail_trend_name(redesc_neg.trend) << " -> DP/gamma influence "
     << (divergence_redescendent ? "bounded and redescendent"
                                 : "not redescendent at this tuning")
     << "\n";
  return os.str();
}

void ConditionProbe::write_csv(std::ostream& os) const {
  os << "quantity,u,value\n";
  char buf[64];
  const auto emit = [&](const char* name, const TailSequence& seq) {
    for (std::size_t j = 0; j < seq.u.size(); ++j) {
      os << name << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", seq.u[j]);
      os << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", seq.value[j]);
      os << buf << '\n';
    }
  };
  emit("u_dlog_g", beta_neg);
  emit("u_dlog_g", beta_pos);
  emit("dlog_g", delta_neg);
  emit("dlog_g", delta_pos);
  emit("g_pow_alpha_u", redesc_neg);
  emit("g_pow_alpha_u", redesc_pos);
}

}  // namespace robord
