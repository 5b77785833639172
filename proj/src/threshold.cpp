#include "sparsefit/threshold.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sparsefit/error.hpp"

namespace sparsefit::threshold {

namespace {

constexpr double kGridStep = 1e-4;

double objective(const PenaltySpec& p, double z, double theta) {
  return 0.5 * (z - theta) * (z - theta) + value(p, theta);
}

}  // namespace

Mode parse_mode(std::string_view name) {
  if (name == "exact") return Mode::Exact;
  if (name == "one-step" || name == "one_step") return Mode::OneStep;
  throw ParseError("threshold: unknown mode '" + std::string(name) + "'");
}

double exact_rule(const PenaltySpec& p, double z) {
  p.validate();
  const double az = std::abs(z);
  if (az == 0.0 || p.lambda == 0.0) return z;
  double theta = 0.0;
  if (is_log(p)) {
    const double disc = az * az - 4.0 * p.lambda;
    if (disc >= 0.0) theta = 0.5 * (az + std::sqrt(disc));
  } else {
    const double upper = az + 1.0;
    const auto steps = static_cast<long>(std::ceil(upper / kGridStep));
    long best_k = 0;
    double best = objective(p, az, 0.0);
    for (long k = 1; k <= steps; ++k) {
      const double f = objective(p, az, std::min(upper, static_cast<double>(k) * kGridStep));
      if (f < best) {
        best = f;
        best_k = k;
      }
    }
    theta = std::min(upper, static_cast<double>(best_k) * kGridStep);
    const double lo = std::max(0.0, theta - kGridStep);
    const double hi = std::min(upper, theta + kGridStep);
    const auto [t, f] = boost::math::tools::brent_find_minima(
        [&](double s) { return objective(p, az, s); }, lo, hi, 52);
    if (f < best) theta = t;
  }
  return std::copysign(theta, z);
}

double one_step_rule(const PenaltySpec& p, double z) {
  p.validate();
  const double dp = derivative(p, std::abs(z));
  if (!std::isfinite(dp)) return 0.0;
  const double shrunk = std::abs(z) - dp;
  return shrunk > 0.0 ? std::copysign(shrunk, z) : 0.0;
}

double rule(const PenaltySpec& p, Mode mode, double z) {
  return mode == Mode::Exact ? exact_rule(p, z) : one_step_rule(p, z);
}

Curve emit_curve(const PenaltySpec& p, Mode mode, std::span<const double> z_grid) {
  Curve c;
  c.z.assign(z_grid.begin(), z_grid.end());
  c.theta.reserve(z_grid.size());
  for (const double z : z_grid) {
    if (!std::isfinite(z)) throw std::invalid_argument("threshold: z grid must be finite");
    c.theta.push_back(rule(p, mode, z));
  }
  for (std::size_t k = 1; k < c.z.size(); ++k) {
    const double dz = std::abs(c.z[k] - c.z[k - 1]);
    const double dt = std::abs(c.theta[k] - c.theta[k - 1]);
    const double scale = 1.0 + std::max(std::abs(c.theta[k]), std::abs(c.theta[k - 1]));
    if (dt > 10.0 * dz * scale) c.discontinuities.push_back(c.z[k]);
  }
  return c;
}

std::vector<double> make_grid(double zmin, double zmax, double step) {
  if (!(step > 0.0) || !(zmax >= zmin) || !std::isfinite(zmin) || !std::isfinite(zmax)) {
    throw std::invalid_argument("threshold: need finite zmin <= zmax and step > 0");
  }
  std::vector<double> grid;
  const auto count = static_cast<long>(std::floor((zmax - zmin) / step + 0.5));
  for (long k = 0; k <= count; ++k) grid.push_back(zmin + static_cast<double>(k) * step);
  return grid;
}

}  // namespace sparsefit::threshold
