#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sparsefit/penalty.hpp"

namespace sparsefit::threshold {

enum class Mode { Exact, OneStep };

Mode parse_mode(std::string_view name);

/// argmin over theta of (z - theta)^2 / 2 + p_lambda(|theta|), by a 1e-4 grid
/// on [0, |z| + 1] followed by Brent refinement around the best grid
/// point; the sign of z is restored at the end. Equal values go to the
/// smaller |theta|.
///
/// The Log objective tends to -inf at 0, so for Log this returns the largest
/// stationary point, (|z| + sqrt(z^2 - 4 lambda)) / 2, when z^2 >= 4 lambda
/// and 0 otherwise.
double exact_rule(const PenaltySpec& p, double z);

/// sign(z) (|z| - p'_lambda(|z|))_+, with an infinite derivative giving 0.
double one_step_rule(const PenaltySpec& p, double z);

double rule(const PenaltySpec& p, Mode mode, double z);

struct Curve {
  std::vector<double> z;
  std::vector<double> theta;
  // Right end z_{k+1} of each interval where
  // |theta_{k+1} - theta_k| > 10 (z_{k+1} - z_k) (1 + max |theta|).
  std::vector<double> discontinuities;
};

Curve emit_curve(const PenaltySpec& p, Mode mode, std::span<const double> z_grid);

// zmin, zmin + step, ... up to zmax (inclusive within step / 2).
std::vector<double> make_grid(double zmin, double zmax, double step);

}  // namespace sparsefit::threshold
