#include "sparsefit/penalty.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "sparsefit/error.hpp"

namespace sparsefit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double parse_number(std::string_view key, std::string_view text) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("penalty: bad number for '" + std::string(key) + "': '" + s + "'");
  }
  if (used != s.size()) {
    throw ParseError("penalty: bad number for '" + std::string(key) + "': '" + s + "'");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

void PenaltySpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ParseError("penalty: lambda must be a finite nonnegative number");
  }
  std::visit(overloaded{
                 [](const Scad& s) {
                   if (!(s.a > 2.0) || !std::isfinite(s.a)) throw ParseError("penalty: SCAD requires a > 2");
                 },
                 [](const Lq& l) {
                   if (!(l.q > 0.0 && l.q < 1.0)) throw ParseError("penalty: Lq requires 0 < q < 1");
                 },
                 [](const Log&) {},
                 [](const L1&) {},
             },
             family);
}

PenaltySpec scad(double lambda, double a) { return {Scad{a}, lambda}; }
PenaltySpec bridge(double lambda, double q) { return {Lq{q}, lambda}; }
PenaltySpec logarithm(double lambda) { return {Log{}, lambda}; }
PenaltySpec lasso(double lambda) { return {L1{}, lambda}; }

bool is_scad(const PenaltySpec& p) { return std::holds_alternative<Scad>(p.family); }
bool is_log(const PenaltySpec& p) { return std::holds_alternative<Log>(p.family); }
bool is_lq(const PenaltySpec& p) { return std::holds_alternative<Lq>(p.family); }
bool is_l1(const PenaltySpec& p) { return std::holds_alternative<L1>(p.family); }
bool is_type1(const PenaltySpec& p) { return !is_scad(p); }
bool has_bounded_objective(const PenaltySpec& p) { return is_scad(p) || is_l1(p); }

double value(const PenaltySpec& p, double t) {
  const double lam = p.lambda;
  return std::visit(overloaded{
                        [&](const Scad& s) {
                          if (t <= lam) return lam * t;
                          if (t <= s.a * lam) {
                            return -(t * t - 2.0 * s.a * lam * t + lam * lam) / (2.0 * (s.a - 1.0));
                          }
                          return (s.a + 1.0) * lam * lam / 2.0;
                        },
                        [&](const Lq& l) { return lam * std::pow(t, l.q); },
                        [&](const Log&) {
                          if (lam == 0.0) return 0.0;
                          return t == 0.0 ? -kInf : lam * std::log(t);
                        },
                        [&](const L1&) { return lam * t; },
                    },
                    p.family);
}

double derivative(const PenaltySpec& p, double t) {
  const double lam = p.lambda;
  return std::visit(overloaded{
                        [&](const Scad& s) {
                          if (t <= lam) return lam;
                          const double excess = s.a * lam - t;
                          return excess > 0.0 ? excess / (s.a - 1.0) : 0.0;
                        },
                        [&](const Lq& l) {
                          if (lam == 0.0) return 0.0;
                          return t == 0.0 ? kInf : lam * l.q * std::pow(t, l.q - 1.0);
                        },
                        [&](const Log&) {
                          if (lam == 0.0) return 0.0;
                          return t == 0.0 ? kInf : lam / t;
                        },
                        [&](const L1&) { return lam; },
                    },
                    p.family);
}

double unit_derivative(const PenaltySpec& p, double t) {
  return std::visit(overloaded{
                        [&](const Scad&) -> double {
                          throw FamilyMismatch("SCAD does not factor as lambda * p(t)");
                        },
                        [&](const Lq& l) { return t == 0.0 ? kInf : l.q * std::pow(t, l.q - 1.0); },
                        [&](const Log&) { return t == 0.0 ? kInf : 1.0 / t; },
                        [&](const L1&) { return 1.0; },
                    },
                    p.family);
}

double lqa_coefficient(const PenaltySpec& p, double t0, double tau0) {
  const double d = derivative(p, t0);
  const double denom = 2.0 * (t0 + tau0);
  if (d == 0.0) return 0.0;
  if (denom == 0.0 || std::isinf(d)) return kInf;
  return d / denom;
}

double lla_majorizer(const PenaltySpec& p, double t0, double t) {
  return value(p, t0) + derivative(p, t0) * (t - t0);
}

double lqa_majorizer(const PenaltySpec& p, double t0, double t) {
  return value(p, t0) + derivative(p, t0) / (2.0 * t0) * (t * t - t0 * t0);
}

double continuity_argmin(const PenaltySpec& p, double upper, double step) {
  double best_theta = step;
  double best = kInf;
  const auto count = static_cast<long>(std::floor(upper / step + 0.5));
  for (long i = 1; i <= count; ++i) {
    const double theta = step * static_cast<double>(i);
    const double f = theta + derivative(p, theta);
    if (f < best) {
      best = f;
      best_theta = theta;
    }
  }
  return best_theta;
}

PenaltySpec parse_penalty(std::string_view text) {
  text = trim(text);
  const auto colon = text.find(':');
  const std::string name(trim(text.substr(0, colon)));
  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  PenaltySpec spec;
  if (name == "scad") {
    spec.family = Scad{};
  } else if (name == "lq" || name == "bridge") {
    spec.family = Lq{};
  } else if (name == "log") {
    spec.family = Log{};
  } else if (name == "l1" || name == "lasso") {
    spec.family = L1{};
  } else {
    throw ParseError("penalty: unknown family '" + name + "'");
  }

  bool saw_q = false;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("penalty: expected key=value, got '" + std::string(item) + "'");
    const std::string key(trim(item.substr(0, eq)));
    const double v = parse_number(key, trim(item.substr(eq + 1)));
    if (key == "lambda") {
      spec.lambda = v;
    } else if (key == "a" && is_scad(spec)) {
      std::get<Scad>(spec.family).a = v;
    } else if (key == "q" && is_lq(spec)) {
      std::get<Lq>(spec.family).q = v;
      saw_q = true;
    } else {
      throw ParseError("penalty: unexpected parameter '" + key + "' for " + name);
    }
  }
  if (is_lq(spec) && !saw_q) throw ParseError("penalty: lq requires q");
  spec.validate();
  return spec;
}

std::string family_name(const PenaltySpec& p) {
  return std::visit(overloaded{
                        [](const Scad&) { return std::string("scad"); },
                        [](const Lq&) { return std::string("lq"); },
                        [](const Log&) { return std::string("log"); },
                        [](const L1&) { return std::string("l1"); },
                    },
                    p.family);
}

std::string to_string(const PenaltySpec& p) {
  std::ostringstream os;
  os.precision(17);
  os << family_name(p) << ":lambda=" << p.lambda;
  if (const auto* s = std::get_if<Scad>(&p.family)) os << ",a=" << s->a;
  if (const auto* l = std::get_if<Lq>(&p.family)) os << ",q=" << l->q;
  return os.str();
}

}  // namespace sparsefit
