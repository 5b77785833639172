// sparsefit: command-line front end for the sparsefit library.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sparsefit/error.hpp"
#include "sparsefit/estimator.hpp"
#include "sparsefit/io.hpp"
#include "sparsefit/parallel.hpp"
#include "sparsefit/sim.hpp"
#include "sparsefit/threshold.hpp"
#include "sparsefit/tuning.hpp"

namespace {

using namespace sparsefit;

constexpr int kBadFlags = 2;
constexpr int kDataError = 3;
constexpr int kNonConvergence = 4;

struct DataArgs {
  std::string data;
  std::string response;
  std::string family = "gaussian";
  bool intercept = false;
};

void add_data_flags(CLI::App* cmd, DataArgs& a) {
  cmd->add_option("--data", a.data, "CSV file with a header row")->required();
  cmd->add_option("--response", a.response, "response column name")->required();
  cmd->add_option("--family", a.family, "gaussian | logistic | poisson");
  cmd->add_flag("--intercept", a.intercept, "add an unpenalized intercept");
}

Dataset load(const DataArgs& a) {
  const Family f = parse_family(a.family);
  return io::to_dataset(io::read_csv_file(a.data), a.response, f, a.intercept);
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw ParseError("bad grid value '" + item + "'");
    grid.push_back(v);
  }
  return grid;
}

Estimator make_estimator(const std::string& method, const std::string& penalty, int k, const std::string& criterion,
                         std::optional<double> eps0, std::optional<double> tau0) {
  Estimator e;
  e.method = parse_method(method);
  e.k = k;
  if (e.method == Method::Subset) {
    e.criterion = subset::parse_criterion(criterion);
  } else {
    e.penalty = parse_penalty(penalty);
  }
  e.lqa_options.eps0 = eps0;
  e.lqa_options.tau0 = tau0;
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparsefit: one-step sparse estimation for generalized linear models"};
  app.require_subcommand(1);
  int threads = default_threads();
  app.add_option("--threads", threads, "worker threads (default $SPARSEFIT_THREADS or 1)")->check(CLI::PositiveNumber);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit one model");
  DataArgs fit_data;
  add_data_flags(fit_cmd, fit_data);
  std::string method = "one-step";
  std::string penalty = "scad:lambda=0,a=3.7";
  std::string criterion = "bic";
  std::optional<double> lambda;
  bool use_cv = false;
  int folds = 5;
  int grid_size = 100;
  std::uint64_t seed = 1;
  int k = 2;
  std::optional<double> eps0, tau0;
  std::string out_path;
  fit_cmd->add_option("--method", method, "one-step | k-step | full-lla | lqa | plqa | subset");
  fit_cmd->add_option("--penalty", penalty, "e.g. scad:lambda=2,a=3.7, lq:lambda=1,q=0.5, log:lambda=1, l1:lambda=1");
  auto* lambda_opt = fit_cmd->add_option("--lambda", lambda, "overrides the lambda in --penalty");
  fit_cmd->add_flag("--cv", use_cv, "choose lambda by cross-validation")->excludes(lambda_opt);
  fit_cmd->add_option("--folds", folds, "CV folds")->check(CLI::Range(2, 1000));
  fit_cmd->add_option("--grid-size", grid_size, "CV grid points")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--criterion", criterion, "aic | bic (subset)");
  fit_cmd->add_option("--seed", seed, "CV fold seed");
  fit_cmd->add_option("--k", k, "steps for k-step")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--eps0", eps0, "LQA deletion threshold");
  fit_cmd->add_option("--tau0", tau0, "perturbed LQA perturbation");
  fit_cmd->add_option("--out", out_path, "output file (default stdout)");

  // path
  auto* path_cmd = app.add_subcommand("path", "one-step estimates along a lambda grid");
  DataArgs path_data;
  add_data_flags(path_cmd, path_data);
  std::string path_penalty = "scad:a=3.7";
  std::string grid_text;
  double ratio = 1e-3;
  std::string path_out;
  path_cmd->add_option("--penalty", path_penalty, "penalty family; lambda is ignored");
  path_cmd->add_option("--grid", grid_text, "comma separated descending lambdas");
  path_cmd->add_option("--grid-size", grid_size, "default grid points")->check(CLI::PositiveNumber);
  path_cmd->add_option("--ratio", ratio, "smallest lambda / lambda_max");
  path_cmd->add_option("--out", path_out, "output CSV (default stdout)");

  // cv
  auto* cv_cmd = app.add_subcommand("cv", "cross-validation curve");
  DataArgs cv_data;
  add_data_flags(cv_cmd, cv_data);
  std::string cv_method = "one-step";
  std::string cv_penalty = "scad:a=3.7";
  std::string cv_grid;
  std::string cv_out;
  cv_cmd->add_option("--method", cv_method, "one-step | k-step | full-lla | lqa | plqa");
  cv_cmd->add_option("--penalty", cv_penalty, "penalty family; lambda is ignored");
  cv_cmd->add_option("--grid", cv_grid, "comma separated descending lambdas");
  cv_cmd->add_option("--grid-size", grid_size, "default grid points")->check(CLI::PositiveNumber);
  cv_cmd->add_option("--folds", folds, "folds")->check(CLI::Range(2, 1000));
  cv_cmd->add_option("--seed", seed, "fold seed");
  cv_cmd->add_option("--k", k, "steps for k-step")->check(CLI::PositiveNumber);
  cv_cmd->add_option("--out", cv_out, "output CSV (default stdout)");

  // threshold
  auto* thr_cmd = app.add_subcommand("threshold", "orthogonal-design thresholding curve");
  std::string thr_penalty;
  std::string mode = "one-step";
  double zmin = -10, zmax = 10, step = 0.01;
  std::string thr_out;
  thr_cmd->add_option("--penalty", thr_penalty, "penalty with lambda")->required();
  thr_cmd->add_option("--mode", mode, "exact | one-step");
  thr_cmd->add_option("--zmin", zmin);
  thr_cmd->add_option("--zmax", zmax);
  thr_cmd->add_option("--step", step);
  thr_cmd->add_option("--out", thr_out, "output CSV (default stdout)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run simulation scenarios");
  std::string config;
  std::string scenario;
  std::optional<int> reps;
  std::optional<std::uint64_t> sim_seed;
  std::string sim_out;
  sim_cmd->add_option("--config", config, "scenario config file")->required();
  sim_cmd->add_option("--scenario", scenario, "run only this section");
  sim_cmd->add_option("--reps", reps, "override replications")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_seed, "override seed");
  sim_cmd->add_option("--out", sim_out, "JSON report file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadFlags;
  }

  try {
    if (fit_cmd->parsed()) {
      const Dataset d = load(fit_data);
      Estimator est = make_estimator(method, penalty, k, criterion, eps0, tau0);
      double lam = lambda.value_or(est.penalty.lambda);
      if (use_cv && est.tuned()) {
        const auto grid = tuning::default_grid(d, est.penalty, grid_size);
        lam = tuning::cv_select(d, est.cv_fitter(), grid, folds, seed, threads).lambda_star;
      }
      const FitResult fit = est.fit(d, lam);
      std::optional<PenaltySpec> spec;
      if (est.tuned()) spec = est.penalty.with_lambda(lam);
      emit(io::fit_to_json(fit, d, spec), out_path);
      if (!fit.converged) {
        std::cerr << "sparsefit: solver did not converge; partial result written\n";
        return kNonConvergence;
      }
    } else if (path_cmd->parsed()) {
      const Dataset d = load(path_data);
      Estimator est;
      est.penalty = parse_penalty(path_penalty);
      const std::vector<double> grid =
          grid_text.empty() ? tuning::default_grid(d, est.penalty, grid_size, ratio) : parse_grid(grid_text);
      emit(io::path_to_csv(grid, est.path(d, grid), d), path_out);
    } else if (cv_cmd->parsed()) {
      const Dataset d = load(cv_data);
      const Estimator est = make_estimator(cv_method, cv_penalty, k, "bic", std::nullopt, std::nullopt);
      if (!est.tuned()) throw ParseError("cv: subset has no lambda to tune");
      const std::vector<double> grid =
          cv_grid.empty() ? tuning::default_grid(d, est.penalty, grid_size) : parse_grid(cv_grid);
      emit(io::cv_to_csv(tuning::cv_select(d, est.cv_fitter(), grid, folds, seed, threads)), cv_out);
    } else if (thr_cmd->parsed()) {
      const PenaltySpec p = parse_penalty(thr_penalty);
      const auto curve = threshold::emit_curve(p, threshold::parse_mode(mode), threshold::make_grid(zmin, zmax, step));
      std::ostringstream out;
      out << "z,theta\n";
      for (std::size_t i = 0; i < curve.z.size(); ++i) {
        out << io::format_number(curve.z[i]) << "," << io::format_number(curve.theta[i]) << "\n";
      }
      out << "# discontinuities," << curve.discontinuities.size() << "\n";
      for (const double z : curve.discontinuities) out << "# jump_at," << io::format_number(z) << "\n";
      emit(out.str(), thr_out);
    } else if (sim_cmd->parsed()) {
      std::ifstream in(config);
      if (!in) throw DataError("cannot open '" + config + "'");
      auto specs = sim::parse_config(in);
      std::string json, table;
      bool found = false;
      for (auto& spec : specs) {
        if (!scenario.empty() && spec.name != scenario) continue;
        found = true;
        if (reps) spec.replications = *reps;
        if (sim_seed) spec.seed = *sim_seed;
        const auto report = sim::run_scenario(spec, threads);
        json += sim::to_json(report);
        table += sim::to_table(report);
      }
      if (!found) throw ParseError("simulate: no scenario named '" + scenario + "'");
      std::cout << table;
      if (!sim_out.empty()) emit(json, sim_out);
    }
  } catch (const ParseError& e) {
    std::cerr << "sparsefit: " << e.what() << "\n";
    return kBadFlags;
  } catch (const NonConvergence& e) {
    std::cerr << "sparsefit: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const Error& e) {
    std::cerr << "sparsefit: " << e.what() << "\n";
    return kDataError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "sparsefit: " << e.what() << "\n";
    return kBadFlags;
  }
  return 0;
}
