// robord: robust ordinal-response regression from the command line.
//
// Subcommands: fit, simulate, influence, residuals, probe.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 convergence failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "robord/csv.hpp"
#include "robord/estimate.hpp"
#include "robord/inference.hpp"
#include "robord/model.hpp"
#include "robord/preprocess.hpp"
#include "robord/residuals.hpp"
#include "robord/sim.hpp"

using nlohmann::ordered_json;

namespace {

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw robord::DataError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

robord::Method make_method(const std::string& name, double tuning,
                           bool tuning_set) {
  if (name == "ml") return robord::Method::ml();
  if (name == "dp" || name == "gamma") {
    if (!tuning_set) {
      throw std::invalid_argument(
          "method '" + name + "' needs --tuning (or --alpha/--gamma)");
    }
    return name == "dp" ? robord::Method::dp(tuning)
                        : robord::Method::gamma(tuning);
  }
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected ml|dp|gamma)");
}

Eigen::VectorXd parse_grid(const std::string& text) {
  double start, stop, step;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 ||
      step <= 0.0 || stop < start) {
    throw std::invalid_argument("bad --grid '" + text +
                                "' (expected start:stop:step)");
  }
  const int count =
      static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  Eigen::VectorXd grid(count);
  for (int i = 0; i < count; ++i) grid[i] = start + i * step;
  return grid;
}

Eigen::VectorXd parse_vector(const std::vector<double>& values) {
  Eigen::VectorXd v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i];
  return v;
}

struct FitFlags {
  std::string data_path, spec_path, out_path, residuals_path;
  std::string method = "ml";
  std::string link = "probit";
  double tuning = 0.0;
  bool tuning_set = false;
  int max_iters = 20000;
  double obj_tol = 1e-10;
  int restarts = 2;
  std::uint64_t seed = 0;
  double fd_step = 1e-5;
  bool no_cov = false;
};

void add_method_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--method", f.method, "Estimator: ml|dp|gamma");
  auto on_tuning = [&f](double v) {
    f.tuning = v;
    f.tuning_set = true;
  };
  cmd->add_option_function<double>("--tuning", on_tuning,
                                   "Tuning parameter in (0,1]");
  cmd->add_option_function<double>("--alpha", on_tuning,
                                   "Alias for --tuning (DP)");
  cmd->add_option_function<double>("--gamma", on_tuning,
                                   "Alias for --tuning (gamma)");
  cmd->add_option("--link", f.link,
                  "Link: probit|logit|loglog|cloglog|cauchit");
  cmd->add_option("--max-iters", f.max_iters, "Optimizer iteration cap");
  cmd->add_option("--tol", f.obj_tol, "Objective-spread stopping tolerance");
  cmd->add_option("--restarts", f.restarts, "Jittered optimizer restarts");
  cmd->add_option("--seed", f.seed, "Seed for restart jitter");
}

robord::FitConfig make_fit_cfg(const FitFlags& f) {
  robord::FitConfig cfg;
  cfg.method = make_method(f.method, f.tuning, f.tuning_set);
  cfg.link = robord::link_from_name(f.link);
  cfg.max_iters = f.max_iters;
  cfg.obj_tol = f.obj_tol;
  cfg.n_restarts = f.restarts;
  cfg.seed = f.seed;
  return cfg;
}

int cmd_fit(const FitFlags& f) {
  const auto spec = robord::parse_column_spec_json(slurp_file(f.spec_path));
  const robord::LoadedData loaded = robord::load_csv(f.data_path, spec);
  const robord::FitConfig cfg = make_fit_cfg(f);
  const robord::FitResult res = robord::fit(loaded.data, cfg);

  ordered_json out;
  out["method"] = f.method;
  if (cfg.method.kind != robord::Method::Kind::ML) {
    out["tuning"] = cfg.method.tuning;
  }
  out["link"] = robord::link_name(cfg.link);
  out["n"] = loaded.data.n();
  out["categories"] = loaded.data.n_categories;
  out["converged"] = res.converged;
  out["iterations"] = res.iterations;
  out["objective"] = res.objective;
  out["beta"] = std::vector<double>(
      res.params.beta.data(), res.params.beta.data() + res.params.beta.size());
  out["delta"] = std::vector<double>(
      res.params.delta.data(),
      res.params.delta.data() + res.params.delta.size());
  out["features"] = loaded.preprocess.feature_names;

  if (!f.no_cov && res.converged) {
    const robord::SandwichCov cov =
        robord::sandwich(cfg.method, res, loaded.data, f.fd_step);
    const robord::WaldResult w = robord::wald(res, cov, loaded.data);
    ordered_json coef = ordered_json::array();
    for (std::size_t k = 0; k < w.coefficients.size(); ++k) {
      const auto& row = w.coefficients[k];
      coef.push_back(ordered_json{{"name", loaded.preprocess.feature_names[k]},
                                  {"estimate", row.estimate},
                                  {"std_error", row.std_error},
                                  {"z", row.z},
                                  {"p_value", row.p_value}});
    }
    out["coefficients"] = coef;
    ordered_json vmat = ordered_json::array();
    for (Eigen::Index i = 0; i < cov.V_hat.rows(); ++i) {
      ordered_json rowj = ordered_json::array();
      for (Eigen::Index j = 0; j < cov.V_hat.cols(); ++j) {
        rowj.push_back(cov.V_hat(i, j));
      }
      vmat.push_back(rowj);
    }
    out["covariance"] = vmat;
    if (cov.info_equality_gap >= 0.0) {
      out["info_equality_gap"] = cov.info_equality_gap;
    }
  }

  robord::atomic_write_file(f.out_path, out.dump(2) + "\n");

  if (!f.residuals_path.empty()) {
    const robord::ResidualReport rep =
        robord::generalized_residuals(res, loaded.data);
    std::ostringstream os;
    rep.write_csv(os);
    robord::atomic_write_file(f.residuals_path, os.str());
  }
  if (!res.converged) {
    std::cerr << "fit did not converge within " << cfg.max_iters
              << " iterations\n";
    return 3;
  }
  return 0;
}

int cmd_residuals(const FitFlags& f) {
  const auto spec = robord::parse_column_spec_json(slurp_file(f.spec_path));
  const robord::LoadedData loaded = robord::load_csv(f.data_path, spec);
  const robord::FitResult res = robord::fit(loaded.data, make_fit_cfg(f));
  if (!res.converged) {
    std::cerr << "fit did not converge; residuals not written\n";
    return 3;
  }
  const robord::ResidualReport rep =
      robord::generalized_residuals(res, loaded.data);
  std::ostringstream os;
  rep.write_csv(os);
  robord::atomic_write_file(f.out_path, os.str());
  return 0;
}

robord::SimScenario scenario_from_json(const ordered_json& doc) {
  robord::SimScenario scn;
  scn.error_dist =
      robord::error_dist_from_name(doc.at("error_dist").get<std::string>());
  scn.link = robord::link_from_name(doc.at("link").get<std::string>());
  scn.n = doc.value("n", 200);
  scn.true_beta = parse_vector(doc.at("true_beta").get<std::vector<double>>());
  scn.true_delta =
      parse_vector(doc.at("true_delta").get<std::vector<double>>());
  scn.outlier_frac = doc.value("outlier_frac", 0.0);
  scn.outlier_mean = doc.value("outlier_mean", 20.0);
  scn.outlier_sd = doc.value("outlier_sd", 1.0);
  scn.replications = doc.value("replications", 1000);
  scn.seed = doc.value("seed", 0);
  if (doc.value("prediction", "modal") == std::string("median")) {
    scn.prediction = robord::PredictionRule::Median;
  }
  return scn;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(slurp_file(scenario_path));
  } catch (const nlohmann::json::exception& e) {
    throw robord::DataError(std::string("scenario: invalid JSON: ") +
                            e.what());
  }
  const robord::SimScenario scn = scenario_from_json(doc);

  if (!doc.contains("methods") || !doc["methods"].is_array() ||
      doc["methods"].empty()) {
    throw robord::DataError("scenario: 'methods' array is required");
  }
  std::vector<std::pair<robord::Method, robord::FitConfig>> methods;
  for (const auto& m : doc["methods"]) {
    const std::string name = m.at("method").get<std::string>();
    const bool has_tuning = m.contains("tuning");
    const robord::Method method = make_method(
        name, has_tuning ? m["tuning"].get<double>() : 0.0, has_tuning);
    robord::FitConfig cfg = robord::make_fit_config(scn, method);
    if (m.contains("link")) {
      cfg.link = robord::link_from_name(m["link"].get<std::string>());
    }
    cfg.max_iters = doc.value("max_iters", cfg.max_iters);
    cfg.obj_tol = doc.value("obj_tol", cfg.obj_tol);
    cfg.n_restarts = doc.value("n_restarts", cfg.n_restarts);
    methods.emplace_back(method, cfg);
  }

  const robord::StudyResult result = robord::run_study(scn, methods);
  std::ostringstream os;
  result.write_csv(os);
  robord::atomic_write_file(out, os.str());
  for (const auto& m : result.per_method) {
    if (m.failures > 0) {
      std::cerr << m.method_label << ": " << m.failures
                << " replications failed and were excluded\n";
    }
  }
  return 0;
}

int cmd_influence(const FitFlags& f, const std::vector<double>& beta,
                  const std::vector<double>& delta, int y,
                  const std::string& grid_text, int covariate) {
  robord::Params params;
  params.beta = parse_vector(beta);
  params.delta = parse_vector(delta);
  params.validate();
  const robord::Method method = make_method(f.method, f.tuning, f.tuning_set);
  const robord::InfluenceProfile prof = robord::influence_profile(
      method, params, robord::link_from_name(f.link), y, parse_grid(grid_text),
      covariate);
  std::ostringstream os;
  prof.write_csv(os);
  robord::atomic_write_file(f.out_path, os.str());
  return 0;
}

int cmd_probe(const std::string& link, double alpha, double u_max,
              const std::string& out) {
  const robord::ConditionProbe probe =
      robord::condition_probe(robord::link_from_name(link), alpha, u_max);
  std::ostringstream os;
  probe.write_csv(os);
  robord::atomic_write_file(out, os.str());
  std::cout << probe.summary();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust ordinal-response regression (ML / density-power / "
               "gamma divergence)"};
  app.require_subcommand(1);

  FitFlags fit_flags;
  CLI::App* fit_cmd =
      app.add_subcommand("fit", "Fit a cumulative-link model to a CSV file");
  fit_cmd->add_option("--data", fit_flags.data_path, "Input CSV")->required();
  fit_cmd->add_option("--spec", fit_flags.spec_path, "Column-spec JSON")
      ->required();
  fit_cmd->add_option("--out", fit_flags.out_path, "Output JSON")->required();
  fit_cmd->add_option("--residuals", fit_flags.residuals_path,
                      "Optional generalized-residual CSV");
  fit_cmd->add_option("--fd-step", fit_flags.fd_step,
                      "Covariance finite-difference step scale");
  fit_cmd->add_flag("--no-cov", fit_flags.no_cov,
                    "Skip sandwich covariance and Wald table");
  add_method_flags(fit_cmd, fit_flags);

  FitFlags resid_flags;
  CLI::App* resid_cmd = app.add_subcommand(
      "residuals", "Fit and write generalized residuals with bands");
  resid_cmd->add_option("--data", resid_flags.data_path, "Input CSV")
      ->required();
  resid_cmd->add_option("--spec", resid_flags.spec_path, "Column-spec JSON")
      ->required();
  resid_cmd->add_option("--out", resid_flags.out_path, "Output CSV")
      ->required();
  add_method_flags(resid_cmd, resid_flags);

  std::string scenario_path, sim_out;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Run a contamination study from a scenario JSON");
  sim_cmd->add_option("--scenario", scenario_path, "Scenario JSON")
      ->required();
  sim_cmd->add_option("--out", sim_out, "Metrics CSV")->required();

  FitFlags infl_flags;
  std::vector<double> infl_beta = {1.0};
  std::vector<double> infl_delta = {-1.5, 0.5, 1.5};
  int infl_y = 1;
  int infl_covariate = 0;
  std::string grid_text = "-10:10:0.1";
  CLI::App* infl_cmd = app.add_subcommand(
      "influence", "Tabulate psi along one covariate for plotting");
  infl_cmd->add_option("--out", infl_flags.out_path, "Output CSV")->required();
  infl_cmd->add_option("--beta", infl_beta, "Coefficient vector");
  infl_cmd->add_option("--delta", infl_delta, "Cutpoint vector");
  infl_cmd->add_option("--y", infl_y, "Observed category held fixed");
  infl_cmd->add_option("--covariate", infl_covariate,
                       "Covariate index swept (0-based)");
  infl_cmd->add_option("--grid", grid_text, "Sweep as start:stop:step");
  add_method_flags(infl_cmd, infl_flags);

  std::string probe_link = "probit", probe_out;
  double probe_alpha = 0.3, probe_umax = 30.0;
  CLI::App* probe_cmd = app.add_subcommand(
      "probe", "Check link-tail conditions for boundedness/redescendence");
  probe_cmd->add_option("--link", probe_link, "Link name");
  probe_cmd->add_option("--alpha", probe_alpha, "Tuning parameter");
  probe_cmd->add_option("--umax", probe_umax, "Grid extent");
  probe_cmd->add_option("--out", probe_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 1;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_flags);
    if (resid_cmd->parsed()) return cmd_residuals(resid_flags);
    if (sim_cmd->parsed()) return cmd_simulate(scenario_path, sim_out);
    if (infl_cmd->parsed()) {
      return cmd_influence(infl_flags, infl_beta, infl_delta, infl_y,
                           grid_text, infl_covariate);
    }
    if (probe_cmd->parsed()) {
      return cmd_probe(probe_link, probe_alpha, probe_umax, probe_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const robord::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return 3;
  } catch (const robord::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
