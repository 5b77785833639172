#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparsefit/estimator.hpp"
#include "sparsefit/glm.hpp"

namespace sparsefit::sim {

enum class Example { Linear, Logistic, Poisson };

Example parse_example(std::string_view name);
std::string example_name(Example e);
Family family_of(Example e);

/// Default true coefficients padded with zeros to length p:
/// (3, 1.5, 0, 0, 2, 0, ...) for linear and logistic,
/// (1.2, 0.6, 0, 0, 0.8, 0, ...) for Poisson.
Eigen::VectorXd default_beta(Example e, int p);

struct ScenarioSpec {
  std::string name = "scenario";
  Example example = Example::Linear;
  int n = 50;
  int p = 12;
  double rho = 0.5;
  Eigen::VectorXd beta_true = default_beta(Example::Linear, 12);
  int replications = 100;
  std::uint64_t seed = 1;
  // Descriptors accepted by parse_estimator, plus "full" (unpenalized
  // full-model fit), "oracle" (returns beta_true) and "oracle-ols" (MLE on
  // the true support).
  std::vector<std::string> methods;
  int test_points = 10000;  // logistic model error sample
  int folds = 5;
  int grid_size = 100;
  double grid_ratio = 1e-3;

  // Throws ParseError on inconsistent fields.
  void validate() const;
};

/// Sigma_ij = rho^|i-j|.
Eigen::MatrixXd ar_covariance(int p, double rho);

// Rows drawn from N(0, Sigma) through a Cholesky factor; the stream is keyed
// by (seed, rep_index), so a replication is reproducible on its own.
Dataset gen_linear(const ScenarioSpec& spec, std::uint64_t rep_index);
Dataset gen_logistic(const ScenarioSpec& spec, std::uint64_t rep_index);
Dataset gen_poisson(const ScenarioSpec& spec, std::uint64_t rep_index);
Dataset generate(const ScenarioSpec& spec, std::uint64_t rep_index);

/// Covariates for the logistic Monte Carlo model error: odd coordinates of z
/// (1-based) kept, even ones replaced by I(z < 0).
Eigen::MatrixXd logistic_covariates(const Eigen::MatrixXd& z);

double model_error_linear(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta, const Eigen::MatrixXd& sigma);
double model_error_poisson(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta, const Eigen::MatrixXd& sigma);
// Mean over rows of test_x of (expit(x' beta_hat) - expit(x' beta))^2.
double model_error_logistic(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta,
                            const Eigen::MatrixXd& test_x);

struct MethodRow {
  std::string method;
  double mrme = 0.0;
  double c_avg = 0.0;
  double ic_avg = 0.0;
  double underfit = 0.0;
  double correctfit = 0.0;
  double overfit = 0.0;
  // Mean over replications of sum_{j in true support} (beta_hat_j - beta_j)^2.
  double support_mse = 0.0;
  int replications = 0;  // successful
  int failures = 0;
  bool valid = true;  // at most 2% failures
};

struct SimulationReport {
  ScenarioSpec spec;
  std::vector<MethodRow> rows;
};

/// Runs every replication of the scenario. Penalized methods get lambda by
/// K-fold CV over the default grid; subset methods use their criterion.
/// Replications may run on `threads` workers; the result does not depend on
/// the thread count.
SimulationReport run_scenario(const ScenarioSpec& spec, int threads = 1);

std::string to_json(const SimulationReport& report);
// Aligned text with columns Method, MRME, C, IC, Under-fit, Correct-fit,
// Over-fit.
std::string to_table(const SimulationReport& report);

/// Flat key = value config; each [section] starts a new scenario named
/// after it. `methods` takes ';'-separated descriptors and `beta` a comma
/// separated vector. '#' starts a comment.
std::vector<ScenarioSpec> parse_config(std::istream& in);

}  // namespace sparsefit::sim
