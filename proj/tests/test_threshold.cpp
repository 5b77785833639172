#include <doctest.h>

#include <cmath>

#include "sparsefit/threshold.hpp"

using namespace sparsefit;
using threshold::Mode;

TEST_CASE("exact rule") {
  for (const auto& p : {scad(2.0), lasso(2.0), bridge(1.0, 0.5)}) CHECK(threshold::exact_rule(p, 0.0) == 0.0);
  CHECK(threshold::exact_rule(scad(2.0), 10.0) == doctest::Approx(10.0).epsilon(1e-8));
  CHECK(threshold::exact_rule(lasso(2.0), 3.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(threshold::exact_rule(lasso(2.0), -3.0) == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(threshold::exact_rule(lasso(2.0), 1.5) == 0.0);
  // Log: largest stationary point of (z - t)^2 / 2 + lambda log t.
  CHECK(threshold::exact_rule(logarithm(2.0), 5.0) == doctest::Approx((5.0 + std::sqrt(17.0)) / 2.0));
  CHECK(threshold::exact_rule(logarithm(2.0), 2.5) == 0.0);
}

TEST_CASE("exact rule matches the soft threshold for L1") {
  for (double z = -6.0; z <= 6.0; z += 0.37) {
    const double soft = std::copysign(std::max(std::abs(z) - 1.3, 0.0), z);
    CHECK(std::abs(threshold::exact_rule(lasso(1.3), z) - soft) <= 2e-4);
  }
}

TEST_CASE("exact SCAD rule has the closed form") {
  // Minimizer of the SCAD penalized least squares problem for orthonormal
  // design, piece by piece.
  const double lam = 2.0, a = 3.7;
  for (double z = 0.05; z <= 10.0; z += 0.1) {
    double expected;
    if (z <= 2.0 * lam) {
      expected = std::max(z - lam, 0.0);
    } else if (z <= a * lam) {
      expected = ((a - 1.0) * z - a * lam) / (a - 2.0);
    } else {
      expected = z;
    }
    CHECK(threshold::exact_rule(scad(lam, a), z) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("one-step rule") {
  CHECK(threshold::one_step_rule(scad(2.0), 8.0) == 8.0);
  CHECK(threshold::one_step_rule(scad(2.0), 4.0) == doctest::Approx(2.7407407407));
  CHECK(threshold::one_step_rule(scad(2.0), 1.0) == 0.0);
  CHECK(threshold::one_step_rule(scad(2.0), -4.0) == doctest::Approx(-2.7407407407));
  CHECK(threshold::one_step_rule(logarithm(2.0), 3.0) == doctest::Approx(3.0 - 2.0 / 3.0));
  for (const auto& p : {scad(2.0), logarithm(2.0), bridge(1.0, 0.3), lasso(1.0)}) {
    CHECK(threshold::one_step_rule(p, 0.0) == 0.0);
  }
}

TEST_CASE("one-step SCAD curve") {
  const auto grid = threshold::make_grid(-10.0, 10.0, 0.01);
  REQUIRE(grid.size() == 2001);
  const auto curve = threshold::emit_curve(scad(2.0), Mode::OneStep, grid);
  CHECK(curve.discontinuities.empty());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double z = grid[k];
    if (std::abs(z) >= 7.4) CHECK(curve.theta[k] == z);
    if (std::abs(z) <= 2.0) CHECK(curve.theta[k] == 0.0);
  }
}

TEST_CASE("exact bridge rule with small q jumps") {
  const auto grid = threshold::make_grid(-5.0, 5.0, 0.01);
  const auto curve = threshold::emit_curve(bridge(2.0, 0.01), Mode::Exact, grid);
  CHECK(curve.discontinuities.size() >= 1);
  // Jump location is symmetric and where (z^2 / 2) first exceeds the penalty.
  const auto exact_scad = threshold::emit_curve(scad(2.0), Mode::Exact, grid);
  CHECK(exact_scad.discontinuities.empty());
}

TEST_CASE("profile convergence of the bridge one-step rule to the log rule") {
  const double lam = 2.0;
  const auto grid = threshold::make_grid(-10.0, 10.0, 0.01);
  double prev = INFINITY;
  for (const double q : {0.1, 0.05, 0.01}) {
    double worst = 0.0;
    for (const double z : grid) {
      const double gap = std::abs(threshold::one_step_rule(bridge(lam / q, q), z) -
                                  threshold::one_step_rule(logarithm(lam), z));
      worst = std::max(worst, gap);
      if (q == 0.01) CHECK(gap <= 0.02 * (1.0 + std::abs(z)));
    }
    CHECK(worst < prev);
    prev = worst;
  }
}

TEST_CASE("grid helper") {
  const auto g = threshold::make_grid(0.0, 1.0, 0.25);
  REQUIRE(g.size() == 5);
  CHECK(g.back() == 1.0);
  CHECK_THROWS(threshold::make_grid(1.0, 0.0, 0.1));
  CHECK_THROWS(threshold::make_grid(0.0, 1.0, 0.0));
  CHECK(threshold::parse_mode("exact") == Mode::Exact);
  CHECK(threshold::parse_mode("one-step") == Mode::OneStep);
}
