// Acceptance run: one [PASS]/[FAIL] line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "../support.hpp"
#include "sparsefit/lla.hpp"
#include "sparsefit/parallel.hpp"
#include "sparsefit/penalty.hpp"
#include "sparsefit/sim.hpp"
#include "sparsefit/threshold.hpp"
#include "sparsefit/wlasso.hpp"

using namespace sparsefit;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Proportions are multiples of 1 / reps, so allow for rounding in the subtraction.
bool within(double v, double target, double tol) { return std::abs(v - target) <= tol + 1e-12; }

int worker_count() {
  const int env = default_threads();
  if (env > 1) return env;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

const sim::MethodRow& row(const sim::SimulationReport& r, const std::string& method) {
  for (const auto& x : r.rows) {
    if (x.method == method) return x;
  }
  throw std::runtime_error("missing row " + method);
}

sim::ScenarioSpec scenario(sim::Example e, int n, int reps, std::uint64_t seed, std::vector<std::string> methods) {
  sim::ScenarioSpec s;
  s.name = sim::example_name(e) + "_n" + std::to_string(n);
  s.example = e;
  s.n = n;
  s.p = 12;
  s.rho = 0.5;
  s.beta_true = sim::default_beta(e, 12);
  s.replications = reps;
  s.seed = seed;
  s.methods = std::move(methods);
  return s;
}

std::string describe(const sim::MethodRow& r) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%s: MRME %.3f C %.2f IC %.2f correct %.3f (%d failures)", r.method.c_str(), r.mrme,
                r.c_avg, r.ic_avg, r.correctfit, r.failures);
  return buf;
}

Verdict table1_n50() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = sim::run_scenario(scenario(sim::Example::Linear, 50, 400, 101, {"one-step/scad"}), worker_count());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& r = row(rep, "one-step/scad");
  const bool ok = r.valid && within(r.mrme, 0.208, 0.06) && within(r.c_avg, 3.00, 0.02) && within(r.ic_avg, 0.55, 0.30) &&
                  within(r.correctfit, 0.771, 0.08) && secs < 300.0;
  return {ok, describe(r) + fmt(", %.1f s", secs)};
}

Verdict table1_n100() {
  const auto rep =
      sim::run_scenario(scenario(sim::Example::Linear, 100, 400, 102, {"one-step/scad", "subset/bic"}), worker_count());
  const auto& scad = row(rep, "one-step/scad");
  const auto& bic = row(rep, "subset/bic");
  const bool ok = scad.valid && bic.valid && within(bic.correctfit, 0.728, 0.08) && within(scad.mrme, 0.234, 0.06);
  return {ok, describe(scad) + "; " + describe(bic)};
}

bool rows_agree(const sim::MethodRow& a, const sim::MethodRow& b, double tol) {
  return within(a.mrme, b.mrme, tol) && within(a.c_avg, b.c_avg, tol) && within(a.ic_avg, b.ic_avg, tol) &&
         within(a.underfit, b.underfit, tol) && within(a.correctfit, b.correctfit, tol) &&
         within(a.overfit, b.overfit, tol);
}

Verdict table2_logistic() {
  const auto rep = sim::run_scenario(
      scenario(sim::Example::Logistic, 200, 100, 103,
               {"one-step/scad", "subset/bic", "one-step/log", "one-step/lq:q=0.01"}),
      worker_count());
  const auto& scad = row(rep, "one-step/scad");
  const auto& bic = row(rep, "subset/bic");
  const auto& log = row(rep, "one-step/log");
  const auto& lq = row(rep, "one-step/lq:q=0.01");
  const bool ok = scad.valid && bic.valid && log.valid && lq.valid && within(scad.mrme, 0.238, 0.10) &&
                  within(bic.correctfit, 0.800, 0.10) && rows_agree(log, lq, 0.02);
  return {ok, describe(scad) + "; " + describe(bic) + "; " + describe(log) + "; " + describe(lq)};
}

Verdict table3_poisson() {
  const auto rep = sim::run_scenario(
      scenario(sim::Example::Poisson, 60, 100, 104, {"subset/bic", "one-step/log"}), worker_count());
  const auto& bic = row(rep, "subset/bic");
  const auto& log = row(rep, "one-step/log");
  const bool ok = bic.valid && log.valid && within(bic.correctfit, 0.735, 0.10) && within(log.mrme, 0.260, 0.10);
  return {ok, describe(bic) + "; " + describe(log)};
}

Verdict ascent() {
  int violations = 0, instances = 0, unconverged = 0;
  double worst = 0.0;
  for (const Family f : {Family::Gaussian, Family::Logistic}) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const Dataset d = testing::random_dataset(f, 100, 8, 5000 + seed);
      std::mt19937_64 g(seed);
      const Coefficients mle = fit_mle(d).beta;
      const double top = lla::lambda_max(d, scad(0.0), mle);
      const double lam = std::uniform_real_distribution<double>(0.02, 0.8)(g) * top;
      const FitResult fit = lla::full_lla(d, scad(lam), mle);
      ++instances;
      if (!fit.converged) ++unconverged;
      for (std::size_t k = 1; k < fit.objective_trace.size(); ++k) {
        const double drop = fit.objective_trace[k - 1] - fit.objective_trace[k];
        worst = std::max(worst, drop);
        if (drop > 1e-8) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(instances) + " instances, " + std::to_string(violations) +
                               " violations, largest drop " + fmt("%.3g", worst) + ", " +
                               std::to_string(unconverged) + " hit max_iter"};
}

Verdict majorization() {
  int violations = 0;
  double worst = 0.0;
  for (const auto& p : {scad(2.0, 3.7), bridge(2.0, 0.5)}) {
    for (int i = 1; i <= 200; ++i) {
      const double t = 0.05 * i;
      for (int k = 1; k <= 200; ++k) {
        const double t0 = 0.05 * k;
        const double pen = value(p, t), line = lla_majorizer(p, t0, t), quad = lqa_majorizer(p, t0, t);
        const double gap = std::max(pen - line, line - quad);
        worst = std::max(worst, gap);
        if (gap > 1e-10) ++violations;
      }
    }
  }
  return {violations == 0, "80000 points, " + std::to_string(violations) + " violations, worst " + fmt("%.3g", worst)};
}

Verdict profile_convergence() {
  const double lam = 2.0;
  const auto grid = threshold::make_grid(-10.0, 10.0, 0.01);
  std::vector<double> worst;
  bool pointwise = true;
  for (const double q : {0.1, 0.05, 0.01}) {
    double w = 0.0;
    for (const double z : grid) {
      const double gap =
          std::abs(threshold::one_step_rule(bridge(lam / q, q), z) - threshold::one_step_rule(logarithm(lam), z));
      w = std::max(w, gap);
      if (q == 0.01 && gap > 0.02 * (1.0 + std::abs(z))) pointwise = false;
    }
    worst.push_back(w);
  }
  const bool ok = worst[0] > worst[1] && worst[1] > worst[2] && pointwise;
  return {ok, "max gaps " + fmt("%.4g", worst[0]) + ", " + fmt("%.4g", worst[1]) + ", " + fmt("%.4g", worst[2])};
}

Verdict scad_identities() {
  const double lam = 2.0, a = 3.7;
  const PenaltySpec p = scad(lam, a);
  const auto grid = threshold::make_grid(-10.0, 10.0, 0.01);
  const auto curve = threshold::emit_curve(p, threshold::Mode::OneStep, grid);
  int bad = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double z = grid[k], th = curve.theta[k];
    if (std::abs(z) >= a * lam && th != z) ++bad;
    if (std::abs(z) <= lam && th != 0.0) ++bad;
  }
  return {bad == 0 && curve.discontinuities.empty(),
          std::to_string(bad) + " identity failures, " + std::to_string(curve.discontinuities.size()) + " flags"};
}

Verdict wlasso_oracle() {
  std::mt19937_64 g(909);
  const double inf = std::numeric_limits<double>::infinity();
  double worst_coef = 0.0, worst_obj = -inf, worst_kkt = 0.0;
  int bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 1 + static_cast<int>(g() % 3);
    const int n = 3 + static_cast<int>(g() % 8);
    wlasso::WlassoProblem prob;
    prob.design = testing::normal_matrix(n, p, g);
    prob.response = testing::normal_matrix(n, 1, g) * 2.0;
    prob.weights.resize(p);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int j = 0; j < p; ++j) {
      const auto kind = g() % 5;
      prob.weights[j] = kind == 0 ? 0.0 : (kind == 1 ? inf : u(g));
    }
    const auto sol = wlasso::solve(prob);
    const Eigen::VectorXd oracle = testing::grid_wlasso(prob);
    const double dc = (sol.beta - oracle).lpNorm<Eigen::Infinity>();
    const double dobj = sol.objective - wlasso::objective(prob, oracle);
    const double kkt = wlasso::certify_kkt(prob, sol.beta);
    worst_coef = std::max(worst_coef, dc);
    worst_obj = std::max(worst_obj, std::abs(dobj));
    worst_kkt = std::max(worst_kkt, kkt);
    if (dc > 5e-3 || std::abs(dobj) > 1e-6 || kkt > 1e-7) ++bad;
  }
  return {bad == 0, "200 problems, max coef gap " + fmt("%.2g", worst_coef) + ", max objective gap " +
                        fmt("%.2g", worst_obj) + ", max KKT " + fmt("%.2g", worst_kkt)};
}

Verdict oracle_trend() {
  std::vector<double> correct;
  double ratio = 0.0;
  std::string detail;
  for (const int n : {100, 400, 1600}) {
    const auto rep = sim::run_scenario(
        scenario(sim::Example::Linear, n, 200, 110 + static_cast<std::uint64_t>(n), {"one-step/scad", "oracle-ols"}),
        worker_count());
    const auto& s = row(rep, "one-step/scad");
    const auto& o = row(rep, "oracle-ols");
    correct.push_back(s.correctfit);
    ratio = s.support_mse / o.support_mse;
    detail += "n=" + std::to_string(n) + fmt(" correct %.3f", s.correctfit) + fmt(" mse ratio %.3f; ", ratio);
  }
  const bool ok = correct[0] <= correct[1] && correct[1] <= correct[2] && correct[2] >= 0.9 && ratio >= 0.9 &&
                  ratio <= 1.3;
  return {ok, detail};
}

Verdict determinism() {
  std::vector<sim::ScenarioSpec> specs{
      scenario(sim::Example::Linear, 50, 24, 7, {"one-step/scad", "one-step/log", "full-lla/scad", "subset/aic", "full"}),
      scenario(sim::Example::Logistic, 120, 12, 8, {"one-step/scad", "subset/bic", "lqa/scad"}),
      scenario(sim::Example::Poisson, 60, 12, 9, {"one-step/lq:q=0.5", "plqa/scad", "k-step/scad:k=2"})};
  for (auto& s : specs) s.test_points = 2000;
  int mismatches = 0;
  for (const auto& s : specs) {
    const auto ref = sim::run_scenario(s, 1);
    const std::string json = sim::to_json(ref), table = sim::to_table(ref);
    for (const int t : {1, 2, 5}) {
      const auto again = sim::run_scenario(s, t);
      if (sim::to_json(again) != json || sim::to_table(again) != table) ++mismatches;
    }
  }
  return {mismatches == 0, "3 scenarios x thread counts {1, 2, 5}, " + std::to_string(mismatches) + " mismatches"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 Example 1 n=50 one-step SCAD", table1_n50},
      {"2 Example 1 n=100 BIC and one-step SCAD", table1_n100},
      {"3 Example 2 logistic n=200", table2_logistic},
      {"4 Example 3 Poisson n=60", table3_poisson},
      {"5 full LLA ascent", ascent},
      {"6 LLA and LQA majorization", majorization},
      {"7 bridge-to-log profile convergence", profile_convergence},
      {"8 one-step SCAD identities", scad_identities},
      {"9 weighted L1 oracle", wlasso_oracle},
      {"10 oracle property trend", oracle_trend},
      {"11 determinism across threads", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
