#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sparsefit/glm.hpp"

namespace sparsefit {

enum class Method { OneStep, KStep, FullLla, Lqa, PerturbedLqa, Subset };

struct FitResult {
  // Indexes Dataset::design() columns; slot 0 is the intercept when present.
  Coefficients coefficients;
  bool has_intercept = false;
  // 0-based predictor indices with an exactly nonzero coefficient.
  std::vector<Eigen::Index> support;
  double lambda = 0.0;
  Method method = Method::OneStep;
  int steps = 1;  // k for Method::KStep
  // Penalized log-likelihood Q at each iterate (or criterion values for subset).
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = true;
  // KKT residual of the final weighted-L1 working problem (LLA methods).
  double kkt_residual = 0.0;
  std::vector<std::string> warnings;

  Eigen::VectorXd predictor_coefficients() const {
    return coefficients.tail(coefficients.size() - (has_intercept ? 1 : 0));
  }
  double intercept() const { return has_intercept ? coefficients[0] : 0.0; }
};

/// Predictor indices (relative to `offset`) of the exactly nonzero entries.
std::vector<Eigen::Index> support_of(const Eigen::VectorXd& coefficients, Eigen::Index offset);

// "one_step", "k_step(3)", "full_lla", "lqa", "perturbed_lqa", "subset".
std::string method_name(const FitResult& fit);

}  // namespace sparsefit
