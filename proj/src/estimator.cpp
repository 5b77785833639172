#include "sparsefit/estimator.hpp"

#include <charconv>

#include "sparsefit/error.hpp"

namespace sparsefit {

FitResult Estimator::fit(const Dataset& d, double lambda, const std::optional<Coefficients>& b0) const {
  const PenaltySpec p = penalty.with_lambda(lambda);
  switch (method) {
    case Method::OneStep:
      return lla::one_step(d, p, b0, lla_options);
    case Method::KStep:
      return lla::k_step(d, p, b0, k, lla_options);
    case Method::FullLla:
      return lla::full_lla(d, p, b0, lla_options);
    case Method::Lqa:
      return lqa::lqa_fit(d, p, b0, lqa_options);
    case Method::PerturbedLqa:
      return lqa::perturbed_lqa_fit(d, p, b0, lqa_options);
    case Method::Subset:
      return subset::best_subset(d, criterion);
  }
  throw std::logic_error("unknown method");
}

std::vector<std::optional<FitResult>> Estimator::path(const Dataset& d, std::span<const double> grid) const {
  std::vector<std::optional<FitResult>> out(grid.size());
  const MleFit mle = fit_mle(d);
  if (method == Method::OneStep) {
    auto fits = lla::one_step_path(d, penalty, grid, mle.beta, lla_options);
    for (std::size_t g = 0; g < fits.size(); ++g) out[g] = std::move(fits[g]);
    return out;
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    try {
      out[g] = fit(d, grid[g], mle.beta);
    } catch (const Error&) {
    }
  }
  return out;
}

tuning::PathFitter Estimator::cv_fitter() const {
  return [self = *this](const Dataset& train, std::span<const double> grid) {
    std::vector<std::optional<Coefficients>> out(grid.size());
    auto fits = self.path(train, grid);
    for (std::size_t g = 0; g < fits.size(); ++g) {
      if (fits[g] && fits[g]->converged) out[g] = std::move(fits[g]->coefficients);
    }
    return out;
  };
}

Method parse_method(std::string_view name) {
  if (name == "one-step") return Method::OneStep;
  if (name == "k-step") return Method::KStep;
  if (name == "full-lla") return Method::FullLla;
  if (name == "lqa") return Method::Lqa;
  if (name == "plqa") return Method::PerturbedLqa;
  if (name == "subset") return Method::Subset;
  throw ParseError("unknown method '" + std::string(name) + "'");
}

Estimator parse_estimator(std::string_view descriptor) {
  const auto slash = descriptor.find('/');
  if (slash == std::string_view::npos) throw ParseError("estimator: expected method/penalty, got '" + std::string(descriptor) + "'");
  Estimator e;
  e.method = parse_method(descriptor.substr(0, slash));
  std::string rest(descriptor.substr(slash + 1));
  if (e.method == Method::Subset) {
    e.criterion = subset::parse_criterion(rest);
    return e;
  }
  // Pull k=... out before handing the rest to the penalty parser.
  for (std::size_t pos = rest.find("k="); pos != std::string::npos; pos = rest.find("k=", pos + 1)) {
    if (pos > 0 && rest[pos - 1] != ':' && rest[pos - 1] != ',') continue;
    std::size_t end = rest.find(',', pos);
    if (end == std::string::npos) end = rest.size();
    const std::string_view digits = std::string_view(rest).substr(pos + 2, end - pos - 2);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), e.k);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || e.k < 1) {
      throw ParseError("estimator: bad k in '" + std::string(descriptor) + "'");
    }
    std::size_t from = pos;
    if (end < rest.size()) {
      ++end;
    } else if (from > 0 && rest[from - 1] == ',') {
      --from;
    }
    rest.erase(from, end - from);
    break;
  }
  if (!rest.empty() && rest.back() == ':') rest.pop_back();
  e.penalty = parse_penalty(rest);
  return e;
}

}  // namespace sparsefit
