#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace sparsefit::wlasso {

/// minimize 1/2 |y - X b|^2 + sum_j v_j |b_j| with v_j in [0, +inf].
/// A zero weight leaves the coordinate unpenalized; an infinite weight pins
/// it at exactly zero.
struct WlassoProblem {
  Eigen::MatrixXd design;
  Eigen::VectorXd response;
  Eigen::VectorXd weights;

  // Throws DimensionMismatch / DataError on malformed input.
  void validate() const;
};

struct WlassoSolution {
  Eigen::VectorXd beta;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int sweeps = 0;
  // Objective after each coordinate sweep; filled when requested.
  std::vector<double> trace;
};

struct SolveOptions {
  double tol = 1e-8;
  int max_sweeps = 10000;
  bool record_trace = false;
};

double objective(const WlassoProblem& prob, const Eigen::VectorXd& beta);

/// Cyclic coordinate descent with active-set sweeps on the Gram matrix.
/// Stops once a full sweep moves no coordinate by more than tol (measured in
/// gradient units, |x_j|^2 |delta b_j|) and the KKT residual is <= 10 tol.
/// Throws NonConvergence after max_sweeps.
WlassoSolution solve(const WlassoProblem& prob, const SolveOptions& options = {},
                     const Eigen::VectorXd* warm_start = nullptr);

/// Largest KKT violation of beta; 0 at an exact optimum.
double certify_kkt(const WlassoProblem& prob, const Eigen::VectorXd& beta);

/// Smallest lambda at which every penalized coordinate of the unit-profile
/// problem (weights = lambda * u) is zero. Unpenalized coordinates (u_j = 0)
/// are fitted first.
double lambda_max(const WlassoProblem& unit_profile);

/// `count` log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> default_grid(double lambda_max, int count = 100, double ratio = 1e-3);

/// Warm-started solutions along a strictly descending lambda grid for the
/// unit-profile problem. Throws std::invalid_argument for a non-descending grid.
std::vector<WlassoSolution> solve_path(const WlassoProblem& unit_profile, std::span<const double> lambda_grid,
                                       const SolveOptions& options = {});

}  // namespace sparsefit::wlasso
