#pragma once

#include <optional>

#include "sparsefit/fit_result.hpp"
#include "sparsefit/glm.hpp"
#include "sparsefit/penalty.hpp"

namespace sparsefit::lqa {

struct Options {
  // Deletion threshold; defaults to 1e-8 * max_j |b0_j|.
  std::optional<double> eps0;
  // Perturbation; defaults to 1e-6 * max_j |b0_j|.
  std::optional<double> tau0;
  double tol = 1e-8;
  int max_iter = 100;
};

/// Local quadratic approximation with the deletion rule: a coordinate whose
/// iterate falls below eps0 is set to zero and never re-enters. Each step
/// maximizes l(beta) - n sum_j c_j beta_j^2 with
/// c_j = p'_lambda(|beta_j|) / (2 |beta_j|).
FitResult lqa_fit(const Dataset& d, const PenaltySpec& p, const std::optional<Coefficients>& b0 = std::nullopt,
                  const Options& options = {});

/// Perturbed LQA: denominators become 2 (|beta_j| + tau0) and nothing is
/// deleted. At convergence coefficients with |beta_j| <= 1e-6 max_k |beta_k|
/// are set to zero so the support is well defined.
FitResult perturbed_lqa_fit(const Dataset& d, const PenaltySpec& p,
                            const std::optional<Coefficients>& b0 = std::nullopt, const Options& options = {});

/// The penalty minorized by the perturbed LQA surrogate:
/// p(theta) - tau0 * integral_0^theta p'(t) / (tau0 + t) dt.
/// Throws FamilyMismatch for Log, whose integral diverges.
double perturbed_penalty(const PenaltySpec& p, double theta, double tau0);

/// l(beta) - n sum_j perturbed_penalty(|beta_j|); nondecreasing along the
/// perturbed LQA iterates.
double perturbed_objective(const Dataset& d, const PenaltySpec& p, double tau0, const Coefficients& beta);

}  // namespace sparsefit::lqa
