#pragma once

#include <span>
#include <string>
#include <string_view>

#include "sparsefit/fit_result.hpp"
#include "sparsefit/glm.hpp"

namespace sparsefit::subset {

enum class Criterion { Aic, Bic };

Criterion parse_criterion(std::string_view name);
std::string criterion_name(Criterion c);

// 2 for AIC, log(n) for BIC.
double criterion_penalty(Criterion c, Eigen::Index n);

/// 2 log-likelihood of the MLE restricted to `predictors` (0-based predictor
/// indices; the intercept is always in). Gaussian data use the profile
/// likelihood in sigma, -n log(RSS / n), dropping constants shared by every
/// subset.
double twice_loglik(const Dataset& d, std::span<const Eigen::Index> predictors);

/// 2 log-likelihood - penalty * |subset|.
double score(const Dataset& d, Criterion c, std::span<const Eigen::Index> predictors);

/// Exhaustive search over all 2^p predictor subsets. Ties go to the smaller
/// subset, then the lexicographically first. Throws TooManyPredictors when
/// p > max_p.
FitResult best_subset(const Dataset& d, Criterion c, int max_p = 20);

}  // namespace sparsefit::subset
