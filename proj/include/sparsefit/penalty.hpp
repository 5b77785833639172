#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace sparsefit {

// Penalty families. lambda lives on PenaltySpec so the family carries only
// its shape parameter.
struct Scad {
  double a = 3.7;
};
struct Lq {
  double q = 0.5;
};
struct Log {};
struct L1 {};

using PenaltyFamily = std::variant<Scad, Lq, Log, L1>;

/// A penalty p_lambda(|beta|) with its regularization level.
///
/// Values and derivatives are extended reals: Log reports value(0) = -inf,
/// and Lq/Log report an infinite right derivative at 0. Downstream code reads
/// an infinite derivative as "coefficient pinned at zero".
struct PenaltySpec {
  PenaltyFamily family = Scad{};
  double lambda = 0.0;

  // Throws ParseError when lambda < 0, a <= 2 or q outside (0, 1).
  void validate() const;

  PenaltySpec with_lambda(double new_lambda) const {
    PenaltySpec copy = *this;
    copy.lambda = new_lambda;
    return copy;
  }
};

PenaltySpec scad(double lambda, double a = 3.7);
PenaltySpec bridge(double lambda, double q);
PenaltySpec logarithm(double lambda);
PenaltySpec lasso(double lambda);

bool is_scad(const PenaltySpec& p);
bool is_log(const PenaltySpec& p);
bool is_lq(const PenaltySpec& p);
bool is_l1(const PenaltySpec& p);

// Type 1 penalties factor as lambda * p(t) with p' > 0 wherever finite
// (Lq, Log, L1). SCAD is the only type 2 family here.
bool is_type1(const PenaltySpec& p);

// Families whose objective is bounded below so ascent monitoring of the
// full penalized likelihood is defined.
bool has_bounded_objective(const PenaltySpec& p);

/// p_lambda(t) for t >= 0.
double value(const PenaltySpec& p, double t);

/// Right derivative p'_lambda(t) for t >= 0; +inf at t = 0 for Lq and Log.
double derivative(const PenaltySpec& p, double t);

/// Lambda-free derivative p'(t) of a type 1 penalty lambda * p(t).
/// Throws FamilyMismatch for SCAD.
double unit_derivative(const PenaltySpec& p, double t);

/// Ridge coefficient of the (perturbed) local quadratic approximation,
/// p'_lambda(t0) / (2 (t0 + tau0)).
double lqa_coefficient(const PenaltySpec& p, double t0, double tau0);

/// Tangent line of the penalty at t0, evaluated at t.
double lla_majorizer(const PenaltySpec& p, double t0, double t);

/// Quadratic LQA majorizer at t0 > 0, evaluated at t.
double lqa_majorizer(const PenaltySpec& p, double t0, double t);

/// Grid minimizer of |theta| + p'_lambda(|theta|) over theta in (0, upper].
/// The minimizer sits at the left edge exactly when the penalized least
/// squares thresholding rule is continuous.
double continuity_argmin(const PenaltySpec& p, double upper = 10.0, double step = 1e-3);

/// Parses "scad:lambda=2,a=3.7", "lq:lambda=1,q=0.5", "log:lambda=2",
/// "l1:lambda=2". Missing lambda defaults to 0, missing a to 3.7.
PenaltySpec parse_penalty(std::string_view text);

std::string to_string(const PenaltySpec& p);

// Family name as used in penalty strings ("scad", "lq", "log", "l1").
std::string family_name(const PenaltySpec& p);

}  // namespace sparsefit
