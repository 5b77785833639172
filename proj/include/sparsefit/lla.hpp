#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparsefit/fit_result.hpp"
#include "sparsefit/glm.hpp"
#include "sparsefit/penalty.hpp"
#include "sparsefit/wlasso.hpp"

namespace sparsefit::lla {

// How the log-likelihood quadratic is centred. AtMle drops the score term
// (the expansion point zeroes the gradient) and uses y* = sqrt(D) mu-hat;
// General keeps it through the IRLS working response
// y* = sqrt(D) mu-hat + score / sqrt(D), for re-expansion at any iterate.
enum class Expansion { AtMle, General };

/// Transformed data that turns a one-step problem into a plain weighted
/// lasso. Coordinates are split into unpenalized (U), penalized (V) and
/// pinned (infinite derivative, fixed at zero).
struct WorkingData {
  Eigen::MatrixXd design;    // x*, n x dim; pinned columns are zero
  Eigen::VectorXd response;  // y*
  std::vector<Eigen::Index> unpenalized;
  std::vector<Eigen::Index> penalized;
  std::vector<Eigen::Index> pinned;
  // Multiply a working coefficient by scale_j to recover beta_j.
  Eigen::VectorXd scale;

  // Filled for type 2 only: (I - H_U) y* and (I - H_U) X*_V.
  Eigen::VectorXd projected_response;
  Eigen::MatrixXd projected_penalized;

  std::vector<std::string> warnings;
};

struct Options {
  double tol = 1e-8;  // outer tolerance for full_lla, max |beta change|
  int max_iter = 100;
  // Type 1 working weights above this cap are treated as pinned.
  double weight_cap = 1e12;
  wlasso::SolveOptions inner{};
};

/// Working data for lambda * p(t) penalties (Lq, Log, L1):
/// x*_ij = sqrt(D_ii) x_ij / p'(|b0_j|). Throws FamilyMismatch for SCAD.
WorkingData build_working_data_type1(const Dataset& d, const Coefficients& b0, const PenaltySpec& p,
                                     Expansion expansion = Expansion::AtMle, double weight_cap = 1e12);

/// Working data for SCAD: columns in V scaled by lambda / p'_lambda(|b0_j|)
/// and everything projected off the span of the U columns. A rank-deficient
/// U block is handled by pseudo-inverse with a warning.
WorkingData build_working_data_type2(const Dataset& d, const Coefficients& b0, const PenaltySpec& p,
                                     Expansion expansion = Expansion::AtMle);

/// Q(beta) = l(beta) - n sum_j p_lambda(|beta_j|) over penalized coordinates.
double penalized_loglik(const Dataset& d, const PenaltySpec& p, const Coefficients& beta);

/// One-step LLA estimate. b0 defaults to the unpenalized MLE.
FitResult one_step(const Dataset& d, const PenaltySpec& p, const std::optional<Coefficients>& b0 = std::nullopt,
                   const Options& options = {});

/// k rounds of the one-step construction, re-expanding the likelihood at each
/// new iterate. k = 1 is one_step.
FitResult k_step(const Dataset& d, const PenaltySpec& p, const std::optional<Coefficients>& b0, int k,
                 const Options& options = {});

/// Fully iterated LLA: each step maximizes l(beta) - n sum w_j |beta_j| with
/// w_j = p'_lambda(|beta_j^(k)|). Only SCAD and L1 are accepted. On
/// max_iter exhaustion the result has converged = false.
FitResult full_lla(const Dataset& d, const PenaltySpec& p, const std::optional<Coefficients>& b0 = std::nullopt,
                   const Options& options = {});

/// Lambda at and above which the one-step estimate from b0 has every
/// penalized coordinate at zero. Exact for type 1 penalties; for SCAD it is
/// max(max_j |x*_j' r*| / n, max_j |b0_j|) over penalized columns, with r*
/// the working response after the unpenalized columns are projected out.
/// Above max |b0_j| every coordinate sits in the lasso part of the penalty.
double lambda_max(const Dataset& d, const PenaltySpec& family, const Coefficients& b0);

/// One-step estimates along a descending lambda grid from a fixed b0. Type 1
/// penalties reuse one working data set with warm starts; SCAD rebuilds the
/// U/V split at every lambda.
std::vector<FitResult> one_step_path(const Dataset& d, const PenaltySpec& family, std::span<const double> grid,
                                     const Coefficients& b0, const Options& options = {});

}  // namespace sparsefit::lla
