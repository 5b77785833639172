#include "sparsefit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "json.hpp"
#include "sparsefit/error.hpp"
#include "sparsefit/parallel.hpp"
#include "sparsefit/random.hpp"
#include "sparsefit/tuning.hpp"

namespace sparsefit::sim {

namespace {

double expit(double u) { return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u)); }

// n x p standard normal rows times L'.
Eigen::MatrixXd correlated_normals(const ScenarioSpec& spec, Eigen::Index rows, std::mt19937_64& g) {
  const Eigen::MatrixXd l = ar_covariance(spec.p, spec.rho).llt().matrixL();
  std::normal_distribution<double> normal;
  Eigen::MatrixXd e(rows, spec.p);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < spec.p; ++j) e(i, j) = normal(g);
  }
  return e * l.transpose();
}

std::vector<std::string> predictor_names(int p) {
  std::vector<std::string> names;
  for (int j = 1; j <= p; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

enum class Special { None, Full, Oracle, OracleOls };

struct MethodPlan {
  std::string label;
  Special special = Special::None;
  Estimator estimator;
};

MethodPlan plan_method(const std::string& descriptor) {
  MethodPlan plan;
  plan.label = descriptor;
  if (descriptor == "full") {
    plan.special = Special::Full;
  } else if (descriptor == "oracle") {
    plan.special = Special::Oracle;
  } else if (descriptor == "oracle-ols") {
    plan.special = Special::OracleOls;
  } else {
    plan.estimator = parse_estimator(descriptor);
  }
  return plan;
}

struct Outcome {
  double ratio = 0.0;
  int c = 0;
  int ic = 0;
  int fit_class = 0;  // -1 under, 0 correct, 1 over
  double block_se = 0.0;
};

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Example parse_example(std::string_view name) {
  if (name == "linear" || name == "gaussian") return Example::Linear;
  if (name == "logistic") return Example::Logistic;
  if (name == "poisson") return Example::Poisson;
  throw ParseError("unknown example '" + std::string(name) + "'");
}

std::string example_name(Example e) {
  switch (e) {
    case Example::Linear:
      return "linear";
    case Example::Logistic:
      return "logistic";
    case Example::Poisson:
      return "poisson";
  }
  return "linear";
}

Family family_of(Example e) {
  switch (e) {
    case Example::Linear:
      return Family::Gaussian;
    case Example::Logistic:
      return Family::Logistic;
    case Example::Poisson:
      return Family::Poisson;
  }
  return Family::Gaussian;
}

Eigen::VectorXd default_beta(Example e, int p) {
  const std::vector<double> head =
      e == Example::Poisson ? std::vector<double>{1.2, 0.6, 0.0, 0.0, 0.8} : std::vector<double>{3.0, 1.5, 0.0, 0.0, 2.0};
  Eigen::VectorXd b = Eigen::VectorXd::Zero(std::max(p, 0));
  for (int j = 0; j < p && j < static_cast<int>(head.size()); ++j) b[j] = head[static_cast<std::size_t>(j)];
  return b;
}

void ScenarioSpec::validate() const {
  if (n < 2) throw ParseError("scenario: n must be at least 2");
  if (p < 1) throw ParseError("scenario: p must be positive");
  if (!(rho > -1.0 && rho < 1.0)) throw ParseError("scenario: rho must lie in (-1, 1)");
  if (beta_true.size() != p) throw ParseError("scenario: beta has " + std::to_string(beta_true.size()) + " entries, p = " + std::to_string(p));
  if (replications < 1) throw ParseError("scenario: replications must be at least 1");
  if (methods.empty()) throw ParseError("scenario: no methods");
  if (test_points < 1) throw ParseError("scenario: test_points must be positive");
  if (folds < 2) throw ParseError("scenario: folds must be at least 2");
  if (grid_size < 1 || !(grid_ratio > 0.0 && grid_ratio <= 1.0)) throw ParseError("scenario: bad grid settings");
  for (const auto& m : methods) plan_method(m);
}

Eigen::MatrixXd ar_covariance(int p, double rho) {
  Eigen::MatrixXd s(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) s(i, j) = std::pow(rho, std::abs(i - j));
  }
  return s;
}

Dataset gen_linear(const ScenarioSpec& spec, std::uint64_t rep_index) {
  auto g = random::engine(spec.seed, rep_index, "data");
  Eigen::MatrixXd x = correlated_normals(spec, spec.n, g);
  std::normal_distribution<double> normal;
  Eigen::VectorXd y = x * spec.beta_true;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += normal(g);
  return Dataset(std::move(x), std::move(y), Family::Gaussian, false, predictor_names(spec.p));
}

Eigen::MatrixXd logistic_covariates(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd x = z;
  for (Eigen::Index j = 1; j < x.cols(); j += 2) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = z(i, j) < 0.0 ? 1.0 : 0.0;
  }
  return x;
}

Dataset gen_logistic(const ScenarioSpec& spec, std::uint64_t rep_index) {
  auto g = random::engine(spec.seed, rep_index, "data");
  Eigen::MatrixXd x = logistic_covariates(correlated_normals(spec, spec.n, g));
  const Eigen::VectorXd eta = x * spec.beta_true;
  Eigen::VectorXd y(spec.n);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    std::bernoulli_distribution coin(expit(eta[i]));
    y[i] = coin(g) ? 1.0 : 0.0;
  }
  return Dataset(std::move(x), std::move(y), Family::Logistic, false, predictor_names(spec.p));
}

Dataset gen_poisson(const ScenarioSpec& spec, std::uint64_t rep_index) {
  auto g = random::engine(spec.seed, rep_index, "data");
  Eigen::MatrixXd x = correlated_normals(spec, spec.n, g);
  const Eigen::VectorXd eta = x * spec.beta_true;
  Eigen::VectorXd y(spec.n);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    std::poisson_distribution<long> count(std::exp(eta[i]));
    y[i] = static_cast<double>(count(g));
  }
  return Dataset(std::move(x), std::move(y), Family::Poisson, false, predictor_names(spec.p));
}

Dataset generate(const ScenarioSpec& spec, std::uint64_t rep_index) {
  switch (spec.example) {
    case Example::Linear:
      return gen_linear(spec, rep_index);
    case Example::Logistic:
      return gen_logistic(spec, rep_index);
    case Example::Poisson:
      return gen_poisson(spec, rep_index);
  }
  return gen_linear(spec, rep_index);
}

double model_error_linear(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta, const Eigen::MatrixXd& sigma) {
  if (beta_hat.size() != beta.size() || sigma.rows() != beta.size()) throw DimensionMismatch("model error: sizes differ");
  const Eigen::VectorXd d = beta_hat - beta;
  return std::max(0.0, d.dot(sigma * d));
}

double model_error_poisson(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta, const Eigen::MatrixXd& sigma) {
  if (beta_hat.size() != beta.size() || sigma.rows() != beta.size()) throw DimensionMismatch("model error: sizes differ");
  auto mgf = [&](const Eigen::VectorXd& a) { return std::exp(0.5 * a.dot(sigma * a)); };
  return std::max(0.0, mgf(2.0 * beta_hat) - 2.0 * mgf(beta_hat + beta) + mgf(2.0 * beta));
}

double model_error_logistic(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta,
                            const Eigen::MatrixXd& test_x) {
  if (beta_hat.size() != beta.size() || test_x.cols() != beta.size()) throw DimensionMismatch("model error: sizes differ");
  const Eigen::VectorXd a = test_x * beta_hat;
  const Eigen::VectorXd b = test_x * beta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double diff = expit(a[i]) - expit(b[i]);
    total += diff * diff;
  }
  return total / static_cast<double>(a.size());
}

SimulationReport run_scenario(const ScenarioSpec& spec, int threads) {
  spec.validate();
  std::vector<MethodPlan> plans;
  for (const auto& m : spec.methods) plans.push_back(plan_method(m));
  const Eigen::MatrixXd sigma = ar_covariance(spec.p, spec.rho);
  std::vector<bool> truth(static_cast<std::size_t>(spec.p));
  std::vector<Eigen::Index> true_support;
  for (int j = 0; j < spec.p; ++j) {
    truth[static_cast<std::size_t>(j)] = spec.beta_true[j] != 0.0;
    if (spec.beta_true[j] != 0.0) true_support.push_back(j);
  }
  const int true_size = static_cast<int>(true_support.size());

  // outcomes[rep][method]
  std::vector<std::vector<std::optional<Outcome>>> outcomes(static_cast<std::size_t>(spec.replications),
                                                            std::vector<std::optional<Outcome>>(plans.size()));
  parallel_for(outcomes.size(), threads, [&](std::size_t rep) {
    const Dataset data = generate(spec, rep);
    Eigen::MatrixXd test_x;
    if (spec.example == Example::Logistic) {
      auto g = random::engine(spec.seed, rep, "model-error");
      test_x = logistic_covariates(correlated_normals(spec, spec.test_points, g));
    }
    auto me = [&](const Eigen::VectorXd& b) {
      switch (spec.example) {
        case Example::Linear:
          return model_error_linear(b, spec.beta_true, sigma);
        case Example::Poisson:
          return model_error_poisson(b, spec.beta_true, sigma);
        case Example::Logistic:
          return model_error_logistic(b, spec.beta_true, test_x);
      }
      return 0.0;
    };

    MleFit full;
    try {
      full = fit_mle(data);
    } catch (const Error&) {
      return;
    }
    const double me_full = me(full.beta);
    const std::uint64_t cv_seed = random::stream_key(spec.seed, rep, "cv");

    for (std::size_t m = 0; m < plans.size(); ++m) {
      const MethodPlan& plan = plans[m];
      Eigen::VectorXd beta_hat;
      try {
        switch (plan.special) {
          case Special::Full:
            beta_hat = full.beta;
            break;
          case Special::Oracle:
            beta_hat = spec.beta_true;
            break;
          case Special::OracleOls: {
            Eigen::MatrixXd xs(data.n(), true_size);
            for (int k = 0; k < true_size; ++k) xs.col(k) = data.design().col(true_support[static_cast<std::size_t>(k)]);
            const MleFit o = fit_mle(data.family(), xs, data.response());
            beta_hat = Eigen::VectorXd::Zero(spec.p);
            for (int k = 0; k < true_size; ++k) beta_hat[true_support[static_cast<std::size_t>(k)]] = o.beta[k];
            break;
          }
          case Special::None: {
            const Estimator& est = plan.estimator;
            FitResult fit;
            if (est.tuned()) {
              const auto grid = tuning::default_grid(data, est.penalty, spec.grid_size, spec.grid_ratio);
              const auto cv = tuning::cv_select(data, est.cv_fitter(), grid, spec.folds, cv_seed);
              fit = est.fit(data, cv.lambda_star, full.beta);
              if (!fit.converged) continue;
            } else {
              fit = est.fit(data, 0.0);
            }
            beta_hat = fit.coefficients;
            break;
          }
        }
      } catch (const Error&) {
        continue;
      }

      Outcome o;
      o.ratio = me_full > 0.0 ? me(beta_hat) / me_full : std::nan("");
      bool extra = false;
      for (int j = 0; j < spec.p; ++j) {
        const bool nz = beta_hat[j] != 0.0;
        if (truth[static_cast<std::size_t>(j)]) {
          o.c += nz ? 1 : 0;
          const double e = beta_hat[j] - spec.beta_true[j];
          o.block_se += e * e;
        } else if (nz) {
          ++o.ic;
          extra = true;
        }
      }
      o.fit_class = o.c < true_size ? -1 : (extra ? 1 : 0);
      outcomes[rep][m] = o;
    }
  });

  SimulationReport report;
  report.spec = spec;
  for (std::size_t m = 0; m < plans.size(); ++m) {
    MethodRow row;
    row.method = plans[m].label;
    std::vector<double> ratios;
    double c = 0, ic = 0, under = 0, correct = 0, over = 0, se = 0;
    for (const auto& rep : outcomes) {
      if (!rep[m]) {
        ++row.failures;
        continue;
      }
      const Outcome& o = *rep[m];
      ++row.replications;
      ratios.push_back(o.ratio);
      c += o.c;
      ic += o.ic;
      se += o.block_se;
      under += o.fit_class < 0 ? 1 : 0;
      correct += o.fit_class == 0 ? 1 : 0;
      over += o.fit_class > 0 ? 1 : 0;
    }
    if (row.replications > 0) {
      const double r = row.replications;
      row.mrme = median(ratios);
      row.c_avg = c / r;
      row.ic_avg = ic / r;
      row.underfit = under / r;
      row.correctfit = correct / r;
      row.overfit = over / r;
      row.support_mse = se / r;
    }
    row.valid = row.replications > 0 &&
                static_cast<double>(row.failures) <= 0.02 * static_cast<double>(spec.replications);
    report.rows.push_back(row);
  }
  return report;
}

std::string to_json(const SimulationReport& report) {
  nlohmann::ordered_json j;
  const auto& s = report.spec;
  j["schema"] = "sparsefit/1";
  j["scenario"] = {{"name", s.name},
                   {"example", example_name(s.example)},
                   {"n", s.n},
                   {"p", s.p},
                   {"rho", s.rho},
                   {"beta_true", std::vector<double>(s.beta_true.data(), s.beta_true.data() + s.beta_true.size())},
                   {"replications", s.replications},
                   {"seed", s.seed},
                   {"folds", s.folds},
                   {"grid_size", s.grid_size},
                   {"grid_ratio", s.grid_ratio},
                   {"test_points", s.test_points}};
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    j["rows"].push_back({{"method", r.method},
                         {"mrme", r.mrme},
                         {"c", r.c_avg},
                         {"ic", r.ic_avg},
                         {"underfit", r.underfit},
                         {"correctfit", r.correctfit},
                         {"overfit", r.overfit},
                         {"support_mse", r.support_mse},
                         {"replications", r.replications},
                         {"failures", r.failures},
                         {"valid", r.valid}});
  }
  return j.dump(2) + "\n";
}

std::string to_table(const SimulationReport& report) {
  std::size_t width = 6;
  for (const auto& r : report.rows) width = std::max(width, r.method.size());
  std::ostringstream out;
  const auto& s = report.spec;
  out << s.name << ": " << example_name(s.example) << ", n = " << s.n << ", p = " << s.p << ", "
      << s.replications << " replications, seed " << s.seed << "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %8s %6s %6s %10s %12s %9s\n", static_cast<int>(width), "Method", "MRME", "C",
                "IC", "Under-fit", "Correct-fit", "Over-fit");
  out << buf;
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%-*s %8.3f %6.2f %6.2f %10.3f %12.3f %9.3f%s\n", static_cast<int>(width),
                  r.method.c_str(), r.mrme, r.c_avg, r.ic_avg, r.underfit, r.correctfit, r.overfit,
                  r.valid ? "" : "  (invalid)");
    out << buf;
    if (r.failures > 0) out << "  " << r.method << ": " << r.failures << " failed replications\n";
  }
  return out.str();
}

std::vector<ScenarioSpec> parse_config(std::istream& in) {
  struct Raw {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };
  std::vector<std::pair<std::string, std::string>> global;
  std::vector<Raw> sections;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("config line " + std::to_string(lineno) + ": unterminated section");
      sections.push_back({trim(line.substr(1, line.size() - 2)), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    auto entry = std::make_pair(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    (sections.empty() ? global : sections.back().entries).push_back(std::move(entry));
  }
  if (sections.empty()) sections.push_back({"scenario", {}});

  auto to_int = [](const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long out = 0;
    try {
      out = std::stoll(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size() || v.empty()) throw ParseError("config: '" + key + "' needs an integer, got '" + v + "'");
    return out;
  };
  auto to_real = [](const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0;
    try {
      out = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size() || v.empty()) throw ParseError("config: '" + key + "' needs a number, got '" + v + "'");
    return out;
  };

  std::vector<ScenarioSpec> specs;
  for (const auto& sec : sections) {
    ScenarioSpec spec;
    spec.name = sec.name;
    std::optional<std::vector<double>> beta;
    auto apply = [&](const std::string& key, const std::string& v) {
      if (key == "example") {
        spec.example = parse_example(v);
      } else if (key == "n") {
        spec.n = static_cast<int>(to_int(key, v));
      } else if (key == "p") {
        spec.p = static_cast<int>(to_int(key, v));
      } else if (key == "rho") {
        spec.rho = to_real(key, v);
      } else if (key == "replications" || key == "reps") {
        spec.replications = static_cast<int>(to_int(key, v));
      } else if (key == "seed") {
        spec.seed = static_cast<std::uint64_t>(to_int(key, v));
      } else if (key == "test_points") {
        spec.test_points = static_cast<int>(to_int(key, v));
      } else if (key == "folds") {
        spec.folds = static_cast<int>(to_int(key, v));
      } else if (key == "grid_size") {
        spec.grid_size = static_cast<int>(to_int(key, v));
      } else if (key == "grid_ratio") {
        spec.grid_ratio = to_real(key, v);
      } else if (key == "beta") {
        std::vector<double> b;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) b.push_back(to_real(key, trim(item)));
        beta = std::move(b);
      } else if (key == "methods") {
        spec.methods.clear();
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ';')) {
          item = trim(item);
          if (!item.empty()) spec.methods.push_back(item);
        }
      } else {
        throw ParseError("config: unknown key '" + key + "'");
      }
    };
    for (const auto& [k, v] : global) apply(k, v);
    for (const auto& [k, v] : sec.entries) apply(k, v);
    if (beta) {
      spec.beta_true = Eigen::Map<const Eigen::VectorXd>(beta->data(), static_cast<Eigen::Index>(beta->size()));
    } else {
      spec.beta_true = default_beta(spec.example, spec.p);
    }
    spec.validate();
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace sparsefit::sim
