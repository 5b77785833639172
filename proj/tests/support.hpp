#pragma once

// Shared fixtures and independent oracles for the unit and acceptance tests.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "sparsefit/glm.hpp"
#include "sparsefit/wlasso.hpp"

namespace testing {

inline Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& g) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = z(g);
  }
  return m;
}

inline double expit(double u) { return 1.0 / (1.0 + std::exp(-u)); }

inline sparsefit::Dataset random_dataset(sparsefit::Family f, Eigen::Index n, Eigen::Index p, std::uint64_t seed,
                                         const Eigen::VectorXd* beta = nullptr) {
  std::mt19937_64 g(seed);
  Eigen::MatrixXd x = normal_matrix(n, p, g);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  if (beta != nullptr) {
    b = *beta;
  } else {
    for (Eigen::Index j = 0; j < p; j += 2) b[j] = (j % 4 == 0 ? 1.0 : -0.7);
  }
  const Eigen::VectorXd eta = x * b;
  Eigen::VectorXd y(n);
  std::normal_distribution<double> z;
  for (Eigen::Index i = 0; i < n; ++i) {
    switch (f) {
      case sparsefit::Family::Gaussian:
        y[i] = eta[i] + z(g);
        break;
      case sparsefit::Family::Logistic:
        y[i] = std::bernoulli_distribution(expit(eta[i]))(g) ? 1.0 : 0.0;
        break;
      case sparsefit::Family::Poisson:
        y[i] = static_cast<double>(std::poisson_distribution<int>(std::exp(0.5 * eta[i]))(g));
        break;
    }
  }
  return sparsefit::Dataset(x, y, f);
}

// n x p design with X'X = n I.
inline Eigen::MatrixXd orthonormal_design(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  const Eigen::MatrixXd a = normal_matrix(n, p, g);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  return std::sqrt(static_cast<double>(n)) * q;
}

// Nested grid search for the weighted-L1 problem: 41 points per axis on a box
// around the incumbent, shrinking the box tenfold per level. Infinite-weight
// coordinates stay at zero. Exact for p <= 3 up to roughly 1e-9.
inline Eigen::VectorXd grid_wlasso(const sparsefit::wlasso::WlassoProblem& prob, int levels = 9) {
  const Eigen::Index p = prob.design.cols();
  std::vector<Eigen::Index> free;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (std::isfinite(prob.weights[j])) free.push_back(j);
  }
  Eigen::VectorXd best = Eigen::VectorXd::Zero(p);
  if (free.empty()) return best;
  Eigen::MatrixXd xf(prob.design.rows(), static_cast<Eigen::Index>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) xf.col(static_cast<Eigen::Index>(k)) = prob.design.col(free[k]);
  const Eigen::VectorXd ls = xf.completeOrthogonalDecomposition().solve(prob.response);
  double half = 2.0 * ls.lpNorm<Eigen::Infinity>() + 1.0;
  auto f = [&](const Eigen::VectorXd& b) { return sparsefit::wlasso::objective(prob, b); };
  double best_f = f(best);
  const int pts = 41;
  const auto m = free.size();
  for (int level = 0; level < levels; ++level) {
    const Eigen::VectorXd center = best;
    const double h = 2.0 * half / (pts - 1);
    std::vector<int> idx(m, 0);
    while (true) {
      Eigen::VectorXd b = center;
      for (std::size_t k = 0; k < m; ++k) b[free[k]] = center[free[k]] - half + h * idx[k];
      const double v = f(b);
      if (v < best_f) {
        best_f = v;
        best = b;
      }
      std::size_t k = 0;
      while (k < m && ++idx[k] == pts) idx[k++] = 0;
      if (k == m) break;
    }
    half /= 10.0;
  }
  // Snap coordinates that sit within one final cell of zero.
  for (const auto j : free) {
    if (std::abs(best[j]) <= 4.0 * half) {
      Eigen::VectorXd z = best;
      z[j] = 0.0;
      if (f(z) <= best_f) {
        best = z;
        best_f = f(z);
      }
    }
  }
  return best;
}

// Central-difference gradient.
template <class F>
Eigen::VectorXd numeric_gradient(F&& f, const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd a = x, b = x;
    a[j] += h;
    b[j] -= h;
    g[j] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

}  // namespace testing
