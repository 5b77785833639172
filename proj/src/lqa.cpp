#include "sparsefit/lqa.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsefit/error.hpp"
#include "sparsefit/lla.hpp"

namespace sparsefit::lqa {

namespace {

Coefficients start_from(const Dataset& d, const std::optional<Coefficients>& b0, std::vector<std::string>& warnings) {
  if (b0) {
    if (b0->size() != d.dim()) throw DimensionMismatch("lqa: initial estimate has wrong length");
    return *b0;
  }
  MleFit mle = fit_mle(d);
  warnings.insert(warnings.end(), mle.warnings.begin(), mle.warnings.end());
  return mle.beta;
}

double max_penalized_abs(const Dataset& d, const Coefficients& b) {
  double m = 0.0;
  for (Eigen::Index j = d.offset(); j < b.size(); ++j) m = std::max(m, std::abs(b[j]));
  return m;
}

// argmax l(beta) - sum_j ridge_j beta_j^2 over the columns with finite
// ridge; the others are held at zero.
Coefficients ridge_maximize(const Dataset& d, const Eigen::VectorXd& ridge, const Coefficients& start, double tol) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < d.dim(); ++j) {
    if (std::isfinite(ridge[j])) cols.push_back(j);
  }
  const auto m = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd x(d.n(), m);
  Eigen::VectorXd r(m), b(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto j = cols[static_cast<std::size_t>(k)];
    x.col(k) = d.design().col(j);
    r[k] = ridge[j];
    b[k] = start[j];
  }
  const auto& y = d.response();
  auto objective = [&](const Eigen::VectorXd& v) {
    return loglik(d.family(), x, y, v) - (r.array() * v.array().square()).sum();
  };

  const int max_newton = d.family() == Family::Gaussian ? 1 : 100;
  double f = objective(b);
  for (int it = 0; it < max_newton && m > 0; ++it) {
    const Eigen::VectorXd mu = x * b;
    Eigen::VectorXd s(d.n()), w(d.n());
    for (Eigen::Index i = 0; i < d.n(); ++i) {
      s[i] = unit_score(d.family(), y[i], mu[i]);
      w[i] = unit_curvature(d.family(), y[i], mu[i]);
    }
    const Eigen::VectorXd g = x.transpose() * s - 2.0 * r.cwiseProduct(b);
    Eigen::MatrixXd h = x.transpose() * w.asDiagonal() * x;
    h.diagonal() += 2.0 * r;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw SingularDesign("lqa: ridge system is singular");
    }
    const Eigen::VectorXd step = ldlt.solve(g);
    if (!step.allFinite()) throw SingularDesign("lqa: ridge system is singular");
    double t = 1.0;
    Eigen::VectorXd next = b + step;
    double f_next = objective(next);
    while (f_next < f && t > 1e-10) {
      t *= 0.5;
      next = b + t * step;
      f_next = objective(next);
    }
    if (f_next < f) break;
    const double change = (next - b).lpNorm<Eigen::Infinity>();
    b = next;
    f = f_next;
    if (change <= tol) break;
  }

  Coefficients out = Coefficients::Zero(d.dim());
  for (Eigen::Index k = 0; k < m; ++k) out[cols[static_cast<std::size_t>(k)]] = b[k];
  return out;
}

FitResult finish(const Dataset& d, Coefficients beta, double lambda, Method method) {
  FitResult fit;
  fit.has_intercept = d.intercept();
  fit.support = support_of(beta, d.offset());
  fit.coefficients = std::move(beta);
  fit.lambda = lambda;
  fit.method = method;
  return fit;
}

}  // namespace

FitResult lqa_fit(const Dataset& d, const PenaltySpec& p, const std::optional<Coefficients>& b0,
                  const Options& options) {
  p.validate();
  std::vector<std::string> warnings;
  Coefficients cur = start_from(d, b0, warnings);
  const double eps0 = options.eps0.value_or(1e-8 * max_penalized_abs(d, cur));
  if (options.eps0 && !(eps0 > 0.0)) throw std::invalid_argument("lqa: eps0 must be positive");
  const double n = static_cast<double>(d.n());

  std::vector<bool> deleted(static_cast<std::size_t>(d.dim()), false);
  auto apply_deletion = [&](Coefficients& b) {
    for (Eigen::Index j = d.offset(); j < d.dim(); ++j) {
      if (deleted[static_cast<std::size_t>(j)] || std::abs(b[j]) < eps0) {
        deleted[static_cast<std::size_t>(j)] = true;
        b[j] = 0.0;
      }
    }
  };

  apply_deletion(cur);
  std::vector<double> trace{lla::penalized_loglik(d, p, cur)};
  Eigen::VectorXd ridge(d.dim());
  bool converged = false;
  int iter = 0;
  while (iter < options.max_iter) {
    ++iter;
    for (Eigen::Index j = 0; j < d.dim(); ++j) {
      if (!d.penalized(j)) {
        ridge[j] = 0.0;
      } else if (deleted[static_cast<std::size_t>(j)]) {
        ridge[j] = std::numeric_limits<double>::infinity();
      } else {
        ridge[j] = n * lqa_coefficient(p, std::abs(cur[j]), 0.0);
      }
    }
    Coefficients next = ridge_maximize(d, ridge, cur, options.tol / 10.0);
    apply_deletion(next);
    const double change = (next - cur).lpNorm<Eigen::Infinity>();
    cur = std::move(next);
    trace.push_back(lla::penalized_loglik(d, p, cur));
    if (change <= options.tol) {
      converged = true;
      break;
    }
  }

  FitResult fit = finish(d, std::move(cur), p.lambda, Method::Lqa);
  fit.iterations = iter;
  fit.converged = converged;
  fit.objective_trace = std::move(trace);
  if (!converged) warnings.push_back("lqa: reached max_iter without convergence");
  fit.warnings = std::move(warnings);
  return fit;
}

FitResult perturbed_lqa_fit(const Dataset& d, const PenaltySpec& p, const std::optional<Coefficients>& b0,
                            const Options& options) {
  p.validate();
  std::vector<std::string> warnings;
  Coefficients cur = start_from(d, b0, warnings);
  const double tau0 = options.tau0.value_or(1e-6 * max_penalized_abs(d, cur));
  if (!(tau0 > 0.0)) throw std::invalid_argument("perturbed lqa: tau0 must be positive");
  const double n = static_cast<double>(d.n());
  const bool traced = !is_log(p);

  std::vector<double> trace;
  if (traced) trace.push_back(perturbed_objective(d, p, tau0, cur));
  Eigen::VectorXd ridge(d.dim());
  bool converged = false;
  int iter = 0;
  while (iter < options.max_iter) {
    ++iter;
    for (Eigen::Index j = 0; j < d.dim(); ++j) {
      ridge[j] = d.penalized(j) ? n * lqa_coefficient(p, std::abs(cur[j]), tau0) : 0.0;
    }
    Coefficients next = ridge_maximize(d, ridge, cur, options.tol / 10.0);
    const double change = (next - cur).lpNorm<Eigen::Infinity>();
    cur = std::move(next);
    if (traced) trace.push_back(perturbed_objective(d, p, tau0, cur));
    if (change <= options.tol) {
      converged = true;
      break;
    }
  }

  const double cutoff = 1e-6 * max_penalized_abs(d, cur);
  for (Eigen::Index j = d.offset(); j < d.dim(); ++j) {
    if (std::abs(cur[j]) <= cutoff) cur[j] = 0.0;
  }

  FitResult fit = finish(d, std::move(cur), p.lambda, Method::PerturbedLqa);
  fit.iterations = iter;
  fit.converged = converged;
  fit.objective_trace = std::move(trace);
  if (!converged) warnings.push_back("perturbed lqa: reached max_iter without convergence");
  fit.warnings = std::move(warnings);
  return fit;
}

double perturbed_penalty(const PenaltySpec& p, double theta, double tau0) {
  if (tau0 == 0.0) return value(p, theta);
  const double lam = p.lambda;
  if (lam == 0.0) return 0.0;
  double integral = 0.0;
  if (is_l1(p)) {
    integral = lam * std::log1p(theta / tau0);
  } else if (const auto* s = std::get_if<Scad>(&p.family)) {
    const double t1 = std::min(theta, lam);
    integral = lam * std::log1p(t1 / tau0);
    if (theta > lam) {
      const double t2 = std::min(theta, s->a * lam);
      integral += ((s->a * lam + tau0) * std::log((tau0 + t2) / (tau0 + lam)) - (t2 - lam)) / (s->a - 1.0);
    }
  } else if (const auto* l = std::get_if<Lq>(&p.family)) {
    // int_0^t s^(q-1) / (tau + s) ds = tau^(q-1) B(t / (tau + t); q, 1 - q)
    const double q = l->q;
    if (theta > 0.0) {
      integral = lam * q * std::pow(tau0, q - 1.0) * boost::math::beta(q, 1.0 - q, theta / (tau0 + theta));
    }
  } else {
    throw FamilyMismatch("perturbed penalty is undefined for the logarithm penalty");
  }
  return value(p, theta) - tau0 * integral;
}

double perturbed_objective(const Dataset& d, const PenaltySpec& p, double tau0, const Coefficients& beta) {
  double pen = 0.0;
  for (Eigen::Index j = d.offset(); j < beta.size(); ++j) pen += perturbed_penalty(p, std::abs(beta[j]), tau0);
  return loglik(d, beta) - static_cast<double>(d.n()) * pen;
}

}  // namespace sparsefit::lqa
