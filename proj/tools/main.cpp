#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>

#include "unrolldiff/datasets.hpp"
#include "unrolldiff/polynomials.hpp"
#include "unrolldiff/problems.hpp"
#include "unrolldiff/unroll.hpp"
#include "verify_suites.hpp"

using json = nlohmann::json;
using namespace unrolldiff;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 1;
constexpr int kExitSuiteFailure = 2;
constexpr int kExitIoError = 3;

struct ExperimentConfig {
  std::string dataset = "synthetic";
  std::string data_path;
  std::string method = "gd";
  double theta = -1.0;      // < 0: 1e-3 ||A||_2 (1.0 for the scalar toy)
  double step_size = -1.0;  // < 0: 2/(L+ell)
  double alpha = 1.0;
  double eta = 1.0;
  int horizon = 100;
  std::uint64_t seed = 0;
  int synthetic_rows = 200;
  int synthetic_cols = 100;
  std::string out = "curve.csv";
};

void apply_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(in);
  if (j.contains("dataset")) cfg.dataset = j["dataset"].get<std::string>();
  if (j.contains("data_path")) cfg.data_path = j["data_path"].get<std::string>();
  if (j.contains("method")) cfg.method = j["method"].get<std::string>();
  if (j.contains("theta")) cfg.theta = j["theta"].get<double>();
  if (j.contains("step_size")) cfg.step_size = j["step_size"].get<double>();
  if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
  if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
  if (j.contains("horizon")) cfg.horizon = j["horizon"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("synthetic_rows")) cfg.synthetic_rows = j["synthetic_rows"].get<int>();
  if (j.contains("synthetic_cols")) cfg.synthetic_cols = j["synthetic_cols"].get<int>();
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
}

struct LoadedProblem {
  QuadraticFamily family;
  Eigen::VectorXd theta;
  json metadata;
};

LoadedProblem load_problem(const ExperimentConfig& cfg) {
  LoadedProblem out;
  out.metadata["dataset"] = cfg.dataset;
  out.metadata["seed"] = cfg.seed;

  if (cfg.dataset == "scalar_toy") {
    const double theta = cfg.theta > 0.0 ? cfg.theta : 1.0;
    out.family = make_scalar_toy({theta / 2.0, theta * 2.0});
    out.family = with_tight_bounds(out.family, Eigen::VectorXd::Constant(1, theta));
    out.theta = Eigen::VectorXd::Constant(1, theta);
    out.metadata["theta"] = theta;
    return out;
  }

  Eigen::MatrixXd design;
  Eigen::VectorXd target;
  if (cfg.dataset == "synthetic") {
    RidgeInstance ridge = make_synthetic_ridge(cfg.synthetic_rows, cfg.synthetic_cols, cfg.seed);
    design = std::move(ridge.design);
    target = std::move(ridge.target);
    out.metadata["synthetic_rows"] = cfg.synthetic_rows;
    out.metadata["synthetic_cols"] = cfg.synthetic_cols;
  } else if (cfg.dataset == "breast_cancer_file" || cfg.dataset == "bodyfat_file") {
    std::string path = cfg.data_path;
    if (path.empty()) {
      path = std::string(cfg.dataset == "breast_cancer_file" ? "data/breast_cancer.libsvm"
                                                             : "data/bodyfat.libsvm");
    }
    // CSV files use their first column as the target; anything else is libsvm.
    const DataSet data = path.size() > 4 && path.substr(path.size() - 4) == ".csv"
                             ? dataset_from_csv(read_csv(path))
                             : read_libsvm(path);
    design = data.features;
    target = data.labels;
    out.metadata["data_path"] = path;
  } else {
    throw CLI::ValidationError("--dataset", "unknown dataset: " + cfg.dataset);
  }

  const double theta = cfg.theta > 0.0 ? cfg.theta : default_ridge_theta(design);
  out.family = make_ridge(design, target, Eigen::VectorXd::Zero(design.cols()),
                          Eigen::VectorXd(), {theta, theta});
  out.theta = Eigen::VectorXd::Constant(1, theta);
  out.family = with_tight_bounds(out.family, out.theta);
  out.metadata["n"] = design.rows();
  out.metadata["d"] = design.cols();
  out.metadata["theta"] = theta;  // resolved value, so the header re-runs exactly
  return out;
}

MethodSchedule make_schedule(const ExperimentConfig& cfg, const QuadraticFamily& fam,
                             double* step_used) {
  const double ell = fam.ell, big_l = fam.big_l;
  if (cfg.method == "gd") {
    const double h = cfg.step_size > 0.0 ? cfg.step_size : 2.0 / (big_l + ell);
    if (step_used) *step_used = h;
    return gd_schedule(h);
  }
  if (step_used) *step_used = 0.0;
  if (cfg.method == "chebyshev") return chebyshev_schedule(ell, big_l);
  if (cfg.method == "heavy_ball") return heavy_ball_schedule(ell, big_l);
  if (cfg.method == "sobolev") return sobolev_schedule({cfg.alpha, cfg.eta, ell, big_l});
  if (cfg.method == "sobolev_asymptotic") return sobolev_asymptotic_schedule(ell, big_l);
  throw CLI::ValidationError("--method", "unknown method: " + cfg.method);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_run(const ExperimentConfig& cfg) {
  if (cfg.horizon < 1) {
    std::cerr << "invalid config: horizon must be >= 1\n";
    return kExitInvalidConfig;
  }
  LoadedProblem problem = load_problem(cfg);
  const QuadraticFamily& fam = problem.family;

  double step_used = 0.0;
  MethodSchedule sched = make_schedule(cfg, fam, &step_used);

  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(fam.dim_x);
  const Eigen::MatrixXd j0 = Eigen::MatrixXd::Zero(fam.dim_x, fam.dim_theta);
  const Trajectory traj = run(fam, problem.theta, sched, x0, j0, cfg.horizon);
  const SuboptimalityCurves curves = suboptimality_curves(traj, fam, problem.theta);
  const BurnInStats stats = burn_in_stats(curves.jacobian_subopt);

  json meta = problem.metadata;
  meta["method"] = cfg.method;
  if (cfg.method == "gd") meta["step_size"] = step_used;
  if (cfg.method == "sobolev") {
    meta["alpha"] = cfg.alpha;
    meta["eta"] = cfg.eta;
  }
  meta["horizon"] = cfg.horizon;
  meta["ell"] = fam.ell;
  meta["big_l"] = fam.big_l;
  meta["kappa"] = fam.ell / fam.big_l;
  meta["d0"] = (j0 - traj.jac_star).norm();
  meta["g"] = cross_derivative_norm(fam, problem.theta, x0, j0);
  meta["burn_in"] = {{"peak_index", stats.peak_index},
                     {"peak_value", stats.peak_value},
                     {"burn_in_length", stats.burn_in_length}};

  write_trajectory_csv(cfg.out, curves, meta.dump());
  std::cout << "wrote " << cfg.out << "\n";
  return kExitOk;
}

int cmd_bounds(double ell, double big_l, double alpha, double eta, double d0, double g,
               int horizon, const std::string& out_path) {
  std::vector<double> sobolev =
      bound_curve_of_schedule(sobolev_schedule({alpha, eta, ell, big_l}), horizon, ell, big_l,
                              d0, g);
  std::vector<double> heavy =
      bound_curve_of_schedule(heavy_ball_schedule(ell, big_l), horizon, ell, big_l, d0, g);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  json meta = {{"ell", ell},   {"big_l", big_l},     {"alpha", alpha}, {"eta", eta},
               {"d0", d0},     {"g", g},             {"horizon", horizon}};
  out << "# " << meta.dump() << "\n";
  out << "t,gd_small,gd_large,chebyshev,sobolev,heavyball_asymptotic,lower_bound\n";
  for (int t = 0; t <= horizon; ++t) {
    const double gd_small = t == 0 ? d0 : gd_bound(1.0 / big_l, ell, big_l, d0, g, t);
    const double gd_large = t == 0 ? d0 : gd_bound(2.0 / (big_l + ell), ell, big_l, d0, g, t);
    out << t << ',' << format_double(gd_small) << ',' << format_double(gd_large) << ','
        << format_double(chebyshev_bound(ell, big_l, d0, g, t)) << ','
        << format_double(sobolev[t]) << ',' << format_double(heavy[t]) << ','
        << format_double(lower_bound(ell, big_l, d0, t)) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + out_path);
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_params(double alpha, double eta, double ell, double big_l, int horizon,
               const std::string& out_path) {
  MethodSchedule sched = sobolev_schedule({alpha, eta, ell, big_l});
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  json meta = {{"alpha", alpha}, {"eta", eta}, {"ell", ell}, {"big_l", big_l},
               {"horizon", horizon}};
  out << "# " << meta.dump() << "\n";
  out << "t,h,m,c1,c2,c3,a,A\n";
  for (int t = 1; t <= horizon; ++t) {
    const StepCoeffs c = sched.at(t);
    out << t << ',' << format_double(c.h) << ',' << format_double(c.m) << ','
        << format_double(c.c1) << ',' << format_double(c.c2) << ',' << format_double(c.c3) << ','
        << format_double(c.a) << ',' << format_double(c.big_a) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + out_path);
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobians of argmin solutions of parametric quadratics via unrolled "
               "differentiation: experiments, theoretical bound curves, and verification"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Unroll a method on a dataset and export curves");
  run_cmd->add_option("--config", config_path, "JSON config file mirroring the flags");
  auto* opt_dataset =
      run_cmd->add_option("--dataset", cfg.dataset,
                          "breast_cancer_file|bodyfat_file|synthetic|scalar_toy");
  auto* opt_data_path = run_cmd->add_option("--data-path", cfg.data_path, "libsvm dataset path");
  auto* opt_method = run_cmd->add_option(
      "--method", cfg.method, "gd|chebyshev|heavy_ball|sobolev|sobolev_asymptotic");
  auto* opt_theta = run_cmd->add_option("--theta", cfg.theta, "ridge parameter (default 1e-3*||A||_2)");
  auto* opt_step = run_cmd->add_option("--step-size", cfg.step_size, "gd step size (default 2/(L+l))");
  auto* opt_alpha = run_cmd->add_option("--alpha", cfg.alpha, "sobolev spectral-density exponent");
  auto* opt_eta = run_cmd->add_option("--eta", cfg.eta, "sobolev derivative penalty");
  auto* opt_horizon = run_cmd->add_option("--horizon", cfg.horizon, "number of iterations");
  auto* opt_seed = run_cmd->add_option("--seed", cfg.seed, "synthetic dataset seed");
  auto* opt_rows = run_cmd->add_option("--synthetic-rows", cfg.synthetic_rows, "synthetic n");
  auto* opt_cols = run_cmd->add_option("--synthetic-cols", cfg.synthetic_cols, "synthetic d");
  auto* opt_out = run_cmd->add_option("--out", cfg.out, "output CSV path");

  double b_ell = 0.5, b_big_l = 10.0, b_alpha = 1.0, b_eta = 20.0, b_d0 = 1.0, b_g = 0.0;
  int b_horizon = 200;
  std::string b_out = "bounds.csv";
  auto* bounds_cmd = app.add_subcommand("bounds", "Emit the theoretical bound curves as CSV");
  bounds_cmd->add_option("--ell", b_ell, "lower spectrum bound")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--big-l", b_big_l, "upper spectrum bound")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--alpha", b_alpha, "sobolev alpha");
  bounds_cmd->add_option("--eta", b_eta, "sobolev eta");
  bounds_cmd->add_option("--d0", b_d0, "initial jacobian suboptimality")->check(CLI::NonNegativeNumber);
  bounds_cmd->add_option("--g", b_g, "cross-derivative norm G")->check(CLI::NonNegativeNumber);
  bounds_cmd->add_option("--horizon", b_horizon, "largest t")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--out", b_out, "output CSV path");

  double p_alpha = 1.0, p_eta = 1.0, p_ell = 0.5, p_big_l = 10.0;
  int p_horizon = 200;
  std::string p_out = "params.csv";
  auto* params_cmd = app.add_subcommand("params", "Dump the sobolev coefficient table as CSV");
  params_cmd->add_option("--alpha", p_alpha, "sobolev alpha");
  params_cmd->add_option("--eta", p_eta, "sobolev eta");
  params_cmd->add_option("--ell", p_ell, "lower spectrum bound")->check(CLI::PositiveNumber);
  params_cmd->add_option("--big-l", p_big_l, "upper spectrum bound")->check(CLI::PositiveNumber);
  params_cmd->add_option("--horizon", p_horizon, "largest t")->check(CLI::PositiveNumber);
  params_cmd->add_option("--out", p_out, "output CSV path");

  std::string suite;
  auto* verify_cmd = app.add_subcommand("verify", "Run a property suite and report pass/fail");
  verify_cmd->add_option("--suite", suite, "identities|orthogonality|oracles|bounds_domination")
      ->required()
      ->check(CLI::IsMember({"identities", "orthogonality", "oracles", "bounds_domination"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidConfig;
  }

  try {
    if (run_cmd->parsed()) {
      if (!config_path.empty()) {
        ExperimentConfig from_file = cfg;
        apply_config_file(config_path, from_file);
        // Explicit flags take precedence over the config file.
        if (opt_dataset->count() == 0) cfg.dataset = from_file.dataset;
        if (opt_data_path->count() == 0) cfg.data_path = from_file.data_path;
        if (opt_method->count() == 0) cfg.method = from_file.method;
        if (opt_theta->count() == 0) cfg.theta = from_file.theta;
        if (opt_step->count() == 0) cfg.step_size = from_file.step_size;
        if (opt_alpha->count() == 0) cfg.alpha = from_file.alpha;
        if (opt_eta->count() == 0) cfg.eta = from_file.eta;
        if (opt_horizon->count() == 0) cfg.horizon = from_file.horizon;
        if (opt_seed->count() == 0) cfg.seed = from_file.seed;
        if (opt_rows->count() == 0) cfg.synthetic_rows = from_file.synthetic_rows;
        if (opt_cols->count() == 0) cfg.synthetic_cols = from_file.synthetic_cols;
        if (opt_out->count() == 0) cfg.out = from_file.out;
      }
      return cmd_run(cfg);
    }
    if (bounds_cmd->parsed()) {
      if (!(b_ell < b_big_l)) {
        std::cerr << "invalid config: --ell must be smaller than --big-l\n";
        return kExitInvalidConfig;
      }
      return cmd_bounds(b_ell, b_big_l, b_alpha, b_eta, b_d0, b_g, b_horizon, b_out);
    }
    if (params_cmd->parsed()) {
      if (!(p_ell < p_big_l)) {
        std::cerr << "invalid config: --ell must be smaller than --big-l\n";
        return kExitInvalidConfig;
      }
      return cmd_params(p_alpha, p_eta, p_ell, p_big_l, p_horizon, p_out);
    }
    if (verify_cmd->parsed()) {
      return unrolldiff::verify::run_suite(suite) ? kExitOk : kExitSuiteFailure;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitOk;
}
