#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparsefit/fit_result.hpp"
#include "sparsefit/glm.hpp"
#include "sparsefit/lla.hpp"
#include "sparsefit/lqa.hpp"
#include "sparsefit/penalty.hpp"
#include "sparsefit/subset.hpp"
#include "sparsefit/tuning.hpp"

namespace sparsefit {

/// A fitting procedure with everything but lambda fixed: method, penalty
/// family and method options. Penalized methods start from the full-model MLE.
struct Estimator {
  Method method = Method::OneStep;
  PenaltySpec penalty = scad(0.0);
  int k = 1;  // KStep only
  subset::Criterion criterion = subset::Criterion::Bic;
  lla::Options lla_options{};
  lqa::Options lqa_options{};

  bool tuned() const { return method != Method::Subset; }

  /// Fit at one lambda (ignored for subset).
  FitResult fit(const Dataset& d, double lambda, const std::optional<Coefficients>& b0 = std::nullopt) const;

  /// Fits along a descending grid from one MLE. A lambda whose fit throws
  /// is left empty.
  std::vector<std::optional<FitResult>> path(const Dataset& d, std::span<const double> grid) const;

  tuning::PathFitter cv_fitter() const;
};

/// "one-step/scad:a=3.7", "one-step/log", "one-step/lq:q=0.01",
/// "k-step/scad:k=2", "full-lla/scad", "lqa/scad", "plqa/scad",
/// "subset/aic", "subset/bic".
Estimator parse_estimator(std::string_view descriptor);

// Method keyword as used on the command line ("one-step", "k-step", ...).
Method parse_method(std::string_view name);

}  // namespace sparsefit
