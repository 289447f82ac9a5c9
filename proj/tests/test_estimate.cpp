#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "robord/estimate.hpp"
#include "robord/sim.hpp"

using namespace robord;

namespace {

// Small probit draw from the contamination-study design.
Dataset sim_dataset(int n, std::uint64_t seed, double beta3 = 0.7) {
  SimScenario scn;
  scn.error_dist = ErrorDist::Normal;
  scn.link = LinkKind::Probit;
  scn.n = n;
  scn.true_beta = Eigen::VectorXd(3);
  scn.true_beta << 2.5, 1.2, beta3;
  scn.true_delta = Eigen::VectorXd(4);
  scn.true_delta << -3.0, -0.7, 1.6, 3.9;
  scn.seed = seed;
  RngStream data_rng(seed, 1, 1), valid_rng(seed, 1, 2);
  return gen_dataset(scn, data_rng, valid_rng).first;
}

}  // namespace

TEST_CASE("cutpoint reparameterization round trip") {
  UnconstrainedParams u;
  u.beta = Eigen::VectorXd::Zero(1);
  u.delta_tilde.resize(3);
  u.delta_tilde << -1.5, std::sqrt(2.0), 1.0;
  const Params p = to_constrained(u);
  CHECK(p.delta[0] == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(p.delta[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.delta[2] == doctest::Approx(1.5).epsilon(1e-12));

  u.delta_tilde << 0.0, 1.0, 1.0;
  const Params q = to_constrained(u);
  CHECK(q.delta[0] == 0.0);
  CHECK(q.delta[1] == 1.0);
  CHECK(q.delta[2] == 2.0);

  RngStream rng(5, 0, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const Params original = oracles::random_params(rng, 2, 5);
    const Params back = to_constrained(from_constrained(original));
    CHECK((back.delta - original.delta).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((back.beta - original.beta).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("from_constrained rejects ties and handles M=2") {
  Params p;
  p.beta = Eigen::VectorXd::Zero(1);
  p.delta = Eigen::VectorXd::Zero(1);  // M = 2, delta = (0)
  const UnconstrainedParams u = from_constrained(p);
  CHECK(u.delta_tilde.size() == 1);
  CHECK(u.delta_tilde[0] == 0.0);

  p.delta.resize(2);
  p.delta << 1.0, 1.0;
  CHECK_THROWS_AS(from_constrained(p), DataError);
}

TEST_CASE("init_params puts cutpoints at frequency quantiles") {
  Dataset d;
  d.n_categories = 4;
  d.y.resize(8);
  d.y << 1, 1, 2, 2, 3, 3, 4, 4;
  d.X = Eigen::MatrixXd::Zero(8, 1);
  const Params p = init_params(d, LinkKind::Logit);
  CHECK(p.beta[0] == 0.0);
  CHECK(p.delta[0] == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));
  CHECK(p.delta[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.delta[2] == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  Dataset two;
  two.n_categories = 2;
  two.y.resize(4);
  two.y << 1, 1, 2, 2;
  two.X = Eigen::MatrixXd::Zero(4, 1);
  CHECK(init_params(two, LinkKind::Probit).delta[0] ==
        doctest::Approx(0.0).epsilon(1e-12));

  Dataset gap;
  gap.n_categories = 4;
  gap.y.resize(4);
  gap.y << 1, 2, 4, 4;  // category 3 missing
  gap.X = Eigen::MatrixXd::Zero(4, 1);
  CHECK_THROWS_WITH_AS(init_params(gap, LinkKind::Probit),
                       doctest::Contains("category 3"), DataError);
}

TEST_CASE("nelder_mead minimizes a shifted quadratic with monotone progress") {
  const Eigen::VectorXd target =
      (Eigen::VectorXd(5) << 1.0, -2.0, 0.5, 3.0, -1.0).finished();
  const auto f = [&](const Eigen::VectorXd& v) {
    return (v - target).squaredNorm() + 7.0;
  };
  std::vector<double> trace;
  const NelderMeadResult res =
      nelder_mead(f, Eigen::VectorXd::Zero(5), 1e-12, 20000, &trace);
  CHECK(res.converged);
  CHECK(res.fx == doctest::Approx(7.0).epsilon(1e-9));
  CHECK((res.x - target).cwiseAbs().maxCoeff() <= 1e-4);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i] <= trace[i - 1]);
  }
}

TEST_CASE("ml fit recovers the generating parameters roughly") {
  const Dataset data = sim_dataset(200, 7);
  FitConfig cfg;
  cfg.method = Method::ml();
  cfg.link = LinkKind::Probit;
  cfg.seed = 7;
  const FitResult res = fit(data, cfg);
  CHECK(res.converged);
  // Single-draw tolerances: three sampling SDs from the study's MSE scale.
  CHECK(std::fabs(res.params.beta[0] - 2.5) <= 0.75);
  CHECK(std::fabs(res.params.beta[1] - 1.2) <= 0.75);
  CHECK(std::fabs(res.params.beta[2] - 0.7) <= 0.95);
  // Objective field matches a fresh evaluation at the returned parameters.
  CHECK(res.objective ==
        doctest::Approx(objective_value(res.params, cfg, data)).epsilon(1e-10));
}

TEST_CASE("dp with tiny alpha matches the ml fit") {
  const Dataset data = sim_dataset(120, 11);
  FitConfig ml_cfg;
  ml_cfg.method = Method::ml();
  ml_cfg.link = LinkKind::Probit;
  ml_cfg.seed = 3;
  const FitResult ml_fit = fit(data, ml_cfg);

  FitConfig dp_cfg = ml_cfg;
  dp_cfg.method = Method::dp(1e-4);
  const FitResult dp_fit = fit(data, dp_cfg);

  CHECK((ml_fit.params.flatten() - dp_fit.params.flatten())
            .cwiseAbs()
            .maxCoeff() <= 1e-3);
}

TEST_CASE("fit on data with an empty category fails loudly") {
  Dataset d;
  d.n_categories = 2;
  d.y = Eigen::VectorXi::Constant(20, 1);
  d.X = Eigen::MatrixXd::Random(20, 1);
  FitConfig cfg;
  cfg.method = Method::ml();
  CHECK_THROWS_AS(fit(d, cfg), DataError);
}

TEST_CASE("fit is reproducible and insensitive to row order") {
  const Dataset data = sim_dataset(150, 19);
  FitConfig cfg;
  cfg.method = Method::dp(0.3);
  cfg.link = LinkKind::Probit;
  cfg.seed = 42;

  const FitResult a = fit(data, cfg);
  const FitResult b = fit(data, cfg);
  CHECK(a.params.flatten() == b.params.flatten());
  CHECK(a.objective == b.objective);
  CHECK(a.iterations == b.iterations);

  Dataset shuffled = data;
  RngStream rng(99, 0, 0);
  for (Eigen::Index i = data.n() - 1; i > 0; --i) {
    const Eigen::Index j =
        static_cast<Eigen::Index>(rng.uniform_below(i + 1));
    std::swap(shuffled.y[i], shuffled.y[j]);
    shuffled.X.row(i).swap(shuffled.X.row(j));
  }
  const FitResult c = fit(shuffled, cfg);
  CHECK((a.params.flatten() - c.params.flatten()).cwiseAbs().maxCoeff() <=
        1e-8);
}

TEST_CASE("numeric gradient of the smooth objectives vanishes at the fit") {
  const Dataset data = sim_dataset(100, 23);
  for (Method method : {Method::dp(0.5), Method::gamma(0.5)}) {
    FitConfig cfg;
    cfg.method = method;
    cfg.link = LinkKind::Probit;
    cfg.seed = 1;
    const FitResult res = fit(data, cfg);
    REQUIRE(res.converged);
    const auto obj = [&](const Eigen::VectorXd& v) {
      return objective_value(Params::unflatten(v, data.p()), cfg, data);
    };
    const Eigen::VectorXd grad =
        oracles::fd_gradient(obj, res.params.flatten(), 1e-5);
    CHECK(grad.cwiseAbs().maxCoeff() <= 1e-4);
  }
}

TEST_CASE("config validation") {
  FitConfig cfg;
  cfg.method = Method::ml();
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.max_iters = 10;
  cfg.obj_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.obj_tol = 1e-8;
  cfg.n_restarts = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
