#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sparsefit/glm.hpp"
#include "sparsefit/penalty.hpp"

namespace sparsefit::tuning {

/// Fits a training set at every lambda of a grid. A missing entry marks a fit
/// that failed at that lambda.
using PathFitter =
    std::function<std::vector<std::optional<Coefficients>>(const Dataset& train, std::span<const double> grid)>;

struct CvPoint {
  double lambda = 0.0;
  double loss = 0.0;
};

struct CvResult {
  double lambda_star = 0.0;
  std::vector<CvPoint> curve;  // grid order
};

/// Seeded permutation of 0..n-1 cut into k contiguous blocks whose sizes
/// differ by at most one.
std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index n, int k, std::uint64_t seed);

/// Mean negative log-likelihood per observation; mean squared error for
/// Gaussian data.
double validation_loss(const Dataset& validation, const Coefficients& beta);

/// K-fold cross-validation. The loss at a lambda is the mean of the fold
/// losses; a failed fold-lambda fit counts as +inf. Returns the minimizer,
/// preferring the larger lambda among values within 1e-12.
CvResult cv_select(const Dataset& d, const PathFitter& fitter, std::span<const double> grid, int k = 5,
                   std::uint64_t seed = 0, int threads = 1);

/// 100 log-spaced values from the one-step lambda_max at the full-data MLE
/// down to 1e-3 of it.
std::vector<double> default_grid(const Dataset& d, const PenaltySpec& family, int count = 100, double ratio = 1e-3);

}  // namespace sparsefit::tuning
