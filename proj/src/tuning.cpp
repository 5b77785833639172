#include "sparsefit/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sparsefit/error.hpp"
#include "sparsefit/lla.hpp"
#include "sparsefit/parallel.hpp"
#include "sparsefit/random.hpp"
#include "sparsefit/wlasso.hpp"

namespace sparsefit::tuning {

std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index n, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cv: k must be at least 2");
  if (n < k) throw DataError("cv: fewer observations than folds");
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  auto g = random::engine(seed, 0, "cv-folds");
  std::shuffle(perm.begin(), perm.end(), g);

  std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
  const Eigen::Index base = n / k;
  const Eigen::Index extra = n % k;
  Eigen::Index at = 0;
  for (Eigen::Index f = 0; f < k; ++f) {
    const Eigen::Index size = base + (f < extra ? 1 : 0);
    auto& fold = folds[static_cast<std::size_t>(f)];
    fold.assign(perm.begin() + at, perm.begin() + at + size);
    std::sort(fold.begin(), fold.end());
    at += size;
  }
  return folds;
}

double validation_loss(const Dataset& validation, const Coefficients& beta) {
  const Eigen::VectorXd mu = validation.design() * beta;
  const auto& y = validation.response();
  double total = 0.0;
  for (Eigen::Index i = 0; i < validation.n(); ++i) {
    if (validation.family() == Family::Gaussian) {
      total += (y[i] - mu[i]) * (y[i] - mu[i]);
    } else {
      total -= unit_loglik(validation.family(), y[i], mu[i]);
    }
  }
  const double loss = total / static_cast<double>(validation.n());
  return std::isnan(loss) ? std::numeric_limits<double>::infinity() : loss;
}

CvResult cv_select(const Dataset& d, const PathFitter& fitter, std::span<const double> grid, int k,
                   std::uint64_t seed, int threads) {
  if (grid.empty()) throw std::invalid_argument("cv: empty lambda grid");
  const auto folds = make_folds(d.n(), k, seed);
  const double inf = std::numeric_limits<double>::infinity();

  // losses[f][g]
  std::vector<std::vector<double>> losses(folds.size(), std::vector<double>(grid.size(), inf));
  parallel_for(folds.size(), threads, [&](std::size_t f) {
    std::vector<bool> held(static_cast<std::size_t>(d.n()), false);
    for (const auto i : folds[f]) held[static_cast<std::size_t>(i)] = true;
    std::vector<Eigen::Index> train;
    for (Eigen::Index i = 0; i < d.n(); ++i) {
      if (!held[static_cast<std::size_t>(i)]) train.push_back(i);
    }
    const Dataset training = d.rows(train);
    const Dataset validation = d.rows(folds[f]);
    std::vector<std::optional<Coefficients>> path;
    try {
      path = fitter(training, grid);
    } catch (const Error&) {
      return;
    }
    for (std::size_t g = 0; g < grid.size() && g < path.size(); ++g) {
      if (path[g]) losses[f][g] = validation_loss(validation, *path[g]);
    }
  });

  CvResult out;
  out.curve.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) sum += losses[f][g];
    out.curve[g] = {grid[g], sum / static_cast<double>(folds.size())};
  }

  double best = inf;
  for (const auto& pt : out.curve) best = std::min(best, pt.loss);
  if (!std::isfinite(best)) throw NonConvergence("cv: no lambda could be fitted in every fold");
  const double slack = 1e-12 * std::max(1.0, std::abs(best));
  out.lambda_star = -inf;
  for (const auto& pt : out.curve) {
    if (pt.loss <= best + slack) out.lambda_star = std::max(out.lambda_star, pt.lambda);
  }
  return out;
}

std::vector<double> default_grid(const Dataset& d, const PenaltySpec& family, int count, double ratio) {
  const MleFit mle = fit_mle(d);
  const double top = lla::lambda_max(d, family, mle.beta);
  if (!(top > 0.0)) return {0.0};
  return wlasso::default_grid(top, count, ratio);
}

}  // namespace sparsefit::tuning
