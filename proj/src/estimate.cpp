#include "robord/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "robord/rng.hpp"

namespace robord {

Eigen::VectorXd UnconstrainedParams::flatten() const {
  Eigen::VectorXd v(beta.size() + delta_tilde.size());
  v.head(beta.size()) = beta;
  v.tail(delta_tilde.size()) = delta_tilde;
  return v;
}

UnconstrainedParams UnconstrainedParams::unflatten(const Eigen::VectorXd& v,
                                                   Eigen::Index p) {
  UnconstrainedParams out;
  out.beta = v.head(p);
  out.delta_tilde = v.tail(v.size() - p);
  return out;
}

Params to_constrained(const UnconstrainedParams& u) {
  Params out;
  out.beta = u.beta;
  out.delta.resize(u.delta_tilde.size());
  double acc = u.delta_tilde.size() > 0 ? u.delta_tilde[0] : 0.0;
  for (Eigen::Index j = 0; j < u.delta_tilde.size(); ++j) {
    if (j > 0) acc += u.delta_tilde[j] * u.delta_tilde[j];
    out.delta[j] = acc;
  }
  return out;
}

UnconstrainedParams from_constrained(const Params& p) {
  p.validate();
  UnconstrainedParams out;
  out.beta = p.beta;
  out.delta_tilde.resize(p.delta.size());
  for (Eigen::Index j = 0; j < p.delta.size(); ++j) {
    out.delta_tilde[j] =
        (j == 0) ? p.delta[0] : std::sqrt(p.delta[j] - p.delta[j - 1]);
  }
  return out;
}

Params init_params(const Dataset& data, LinkKind link) {
  data.validate();
  const int M = data.n_categories;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(M);
  for (Eigen::Index i = 0; i < data.n(); ++i) counts[data.y[i] - 1] += 1.0;
  for (int m = 0; m < M; ++m) {
    if (counts[m] == 0.0) {
      std::ostringstream os;
      os << "init_params: category " << m + 1 << " has no observations";
      throw DataError(os.str());
    }
  }
  Params out;
  out.beta = Eigen::VectorXd::Zero(data.p());
  out.delta.resize(M - 1);
  double cum = 0.0;
  const double n = static_cast<double>(data.n());
  for (int m = 0; m < M - 1; ++m) {
    cum += counts[m];
    out.delta[m] = link_quantile(link, cum / n);
  }
  return out;
}

void FitConfig::validate() const {
  method.validate();
  if (max_iters < 1) throw std::invalid_argument("FitConfig: max_iters >= 1");
  if (!(obj_tol > 0.0)) throw std::invalid_argument("FitConfig: obj_tol > 0");
  if (n_restarts < 0) throw std::invalid_argument("FitConfig: n_restarts >= 0");
}

NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, double obj_tol, int max_iters,
    std::vector<double>* trace) {
  const Eigen::Index dim = x0.size();
  const double rho = 1.0;    // reflection
  const double chi = 2.0;    // expansion
  const double gam = 0.5;    // contraction
  const double sig = 0.5;    // shrink

  std::vector<Eigen::VectorXd> pts(dim + 1, x0);
  std::vector<double> fv(dim + 1);
  for (Eigen::Index j = 0; j < dim; ++j) {
    pts[j + 1][j] += 0.1 * std::max(1.0, std::fabs(x0[j]));
  }
  for (Eigen::Index j = 0; j <= dim; ++j) fv[j] = f(pts[j]);

  std::vector<Eigen::Index> order(dim + 1);
  NelderMeadResult res;
  for (res.iterations = 0; res.iterations < max_iters; ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return fv[a] < fv[b]; });
    const Eigen::Index best = order.front();
    const Eigen::Index worst = order.back();
    const Eigen::Index second_worst = order[dim - 1];
    if (trace) trace->push_back(fv[best]);
    if (fv[worst] - fv[best] < obj_tol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index j = 0; j <= dim; ++j) {
      if (j != worst) centroid += pts[j];
    }
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd xr = centroid + rho * (centroid - pts[worst]);
    const double fr = f(xr);
    if (fr < fv[best]) {
      const Eigen::VectorXd xe = centroid + chi * (xr - centroid);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second_worst]) {
      pts[worst] = xr;
      fv[worst] = fr;
    } else {
      bool shrink = false;
      if (fr < fv[worst]) {
        const Eigen::VectorXd xc = centroid + gam * (xr - centroid);
        const double fc = f(xc);
        if (fc <= fr) {
          pts[worst] = xc;
          fv[worst] = fc;
        } else {
          shrink = true;
        }
      } else {
        const Eigen::VectorXd xc = centroid - gam * (centroid - pts[worst]);
        const double fc = f(xc);
        if (fc < fv[worst]) {
          pts[worst] = xc;
          fv[worst] = fc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (Eigen::Index j = 0; j <= dim; ++j) {
          if (j == best) continue;
          pts[j] = pts[best] + sig * (pts[j] - pts[best]);
          fv[j] = f(pts[j]);
        }
      }
    }
  }

  const Eigen::Index best =
      std::min_element(fv.begin(), fv.end()) - fv.begin();
  res.x = pts[best];
  res.fx = fv[best];
  return res;
}

double objective_value(const Params& params, const FitConfig& cfg,
                       const Dataset& data) {
  switch (cfg.method.kind) {
    case Method::Kind::ML:
      return neg_log_lik(params, cfg.link, data);
    case Method::Kind::DP:
      return dp_objective(params, cfg.link, data, cfg.method.tuning);
    case Method::Kind::Gamma:
      return gamma_objective(params, cfg.link, data, cfg.method.tuning);
  }
  return 0.0;
}

FitResult fit(const Dataset& data, const FitConfig& cfg) {
  data.validate();
  cfg.validate();
  const Eigen::Index p = data.p();

  const UnconstrainedParams u0 = from_constrained(init_params(data, cfg.link));
  const Eigen::VectorXd v0 = u0.flatten();

  const auto objective = [&](const Eigen::VectorXd& v) {
    return objective_value(to_constrained(UnconstrainedParams::unflatten(v, p)),
                           cfg, data);
  };
  if (!std::isfinite(objective(v0))) {
    throw ConvergenceError("fit: objective non-finite at the starting point");
  }

  NelderMeadResult best;
  bool have_best = false;
  for (int r = 0; r <= cfg.n_restarts; ++r) {
    Eigen::VectorXd start = v0;
    if (r > 0) {
      RngStream rng(cfg.seed, static_cast<std::uint64_t>(r), /*role=*/0xF17);
      for (Eigen::Index j = 0; j < start.size(); ++j) {
        start[j] += rng.uniform01() - 0.5;
      }
      if (!std::isfinite(objective(start))) continue;
    }
    NelderMeadResult run =
        nelder_mead(objective, start, cfg.obj_tol, cfg.max_iters);
    if (!have_best || run.fx < best.fx) {
      best = run;
      have_best = true;
    }
  }

  FitResult out;
  out.params = to_constrained(UnconstrainedParams::unflatten(best.x, p));
  try {
    out.params.validate();
  } catch (const DataError& e) {
    throw ConvergenceError(std::string("fit: optimizer returned degenerate "
                                       "cutpoints: ") +
                           e.what());
  }
  out.objective = best.fx;
  out.converged = best.converged;
  out.iterations = best.iterations;
  out.method = cfg.method;
  out.link = cfg.link;
  return out;
}

}  // namespace robord
