#include "sparsefit/lla.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "sparsefit/error.hpp"

namespace sparsefit::lla {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Expanded {
  Eigen::VectorXd sqrt_d;
  Eigen::VectorXd response;
};

Expanded expand(const Dataset& d, const Coefficients& b, Expansion expansion) {
  if (b.size() != d.dim()) throw DimensionMismatch("lla: coefficient length does not match design");
  const Eigen::VectorXd mu = d.design() * b;
  Expanded e;
  e.sqrt_d.resize(d.n());
  e.response.resize(d.n());
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const double yi = d.response()[i];
    const double sd = std::sqrt(unit_curvature(d.family(), yi, mu[i]));
    e.sqrt_d[i] = sd;
    double r = sd * mu[i];
    if (expansion == Expansion::General) r = sd > 0.0 ? r + unit_score(d.family(), yi, mu[i]) / sd : 0.0;
    e.response[i] = r;
  }
  return e;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = x.col(cols[k]);
  return out;
}

double n_of(const Dataset& d) { return static_cast<double>(d.n()); }

FitResult make_result(const Dataset& d, Coefficients beta, double lambda, Method method) {
  FitResult fit;
  fit.has_intercept = d.intercept();
  fit.support = support_of(beta, d.offset());
  fit.coefficients = std::move(beta);
  fit.lambda = lambda;
  fit.method = method;
  return fit;
}

// Solves the working problem and maps the solution back to beta.
struct Recovered {
  Coefficients beta;
  double kkt = 0.0;
};

Recovered solve_type1(const WorkingData& wd, double level, const wlasso::SolveOptions& inner,
                      const Eigen::VectorXd* warm = nullptr) {
  const Eigen::Index dim = wd.design.cols();
  wlasso::WlassoProblem prob{wd.design, wd.response, Eigen::VectorXd::Zero(dim)};
  for (const auto j : wd.penalized) prob.weights[j] = level;
  for (const auto j : wd.pinned) prob.weights[j] = kInf;
  const auto sol = wlasso::solve(prob, inner, warm);
  Recovered r;
  r.beta = Coefficients::Zero(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (sol.beta[j] != 0.0) r.beta[j] = sol.beta[j] * wd.scale[j];
  }
  r.kkt = sol.kkt_residual;
  return r;
}

Recovered solve_type2(const WorkingData& wd, double level, const wlasso::SolveOptions& inner) {
  const Eigen::Index dim = wd.design.cols();
  Recovered r;
  r.beta = Coefficients::Zero(dim);

  Eigen::VectorXd beta_v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(wd.penalized.size()));
  if (!wd.penalized.empty()) {
    wlasso::WlassoProblem prob{wd.projected_penalized, wd.projected_response,
                               Eigen::VectorXd::Constant(beta_v.size(), level)};
    const auto sol = wlasso::solve(prob, inner);
    beta_v = sol.beta;
    r.kkt = sol.kkt_residual;
  }
  if (!wd.unpenalized.empty()) {
    Eigen::VectorXd target = wd.response;
    if (!wd.penalized.empty()) target -= gather(wd.design, wd.penalized) * beta_v;
    const Eigen::VectorXd beta_u = gather(wd.design, wd.unpenalized).completeOrthogonalDecomposition().solve(target);
    for (std::size_t k = 0; k < wd.unpenalized.size(); ++k) r.beta[wd.unpenalized[k]] = beta_u[static_cast<Eigen::Index>(k)];
  }
  for (std::size_t k = 0; k < wd.penalized.size(); ++k) {
    const auto j = wd.penalized[k];
    const double bj = beta_v[static_cast<Eigen::Index>(k)];
    if (bj != 0.0) r.beta[j] = bj * wd.scale[j];
  }
  return r;
}

Recovered one_step_core(const Dataset& d, const PenaltySpec& p, const Coefficients& b0, Expansion expansion,
                        const Options& options, std::vector<std::string>& warnings) {
  const double level = n_of(d) * p.lambda;
  if (is_type1(p)) {
    const WorkingData wd = build_working_data_type1(d, b0, p, expansion, options.weight_cap);
    return solve_type1(wd, level, options.inner);
  }
  const WorkingData wd = build_working_data_type2(d, b0, p, expansion);
  warnings.insert(warnings.end(), wd.warnings.begin(), wd.warnings.end());
  return solve_type2(wd, level, options.inner);
}

Coefficients initial_estimate(const Dataset& d, const std::optional<Coefficients>& b0,
                              std::vector<std::string>& warnings) {
  if (b0) {
    if (b0->size() != d.dim()) throw DimensionMismatch("lla: initial estimate has wrong length");
    return *b0;
  }
  MleFit mle = fit_mle(d);
  warnings.insert(warnings.end(), mle.warnings.begin(), mle.warnings.end());
  return std::move(mle.beta);
}

// argmax l(beta) - sum_j w_j |beta_j|, started from `start`.
Coefficients maximize_weighted(const Dataset& d, const Eigen::VectorXd& w, const Coefficients& start,
                               const Options& options) {
  if (d.family() == Family::Gaussian) {
    const wlasso::WlassoProblem prob{d.design(), d.response(), w};
    return wlasso::solve(prob, options.inner, &start).beta;
  }
  auto objective = [&](const Coefficients& b) {
    double pen = 0.0;
    for (Eigen::Index j = 0; j < b.size(); ++j) pen += w[j] * std::abs(b[j]);
    return loglik(d, b) - pen;
  };
  Coefficients cur = start;
  double f_cur = objective(cur);
  const double inner_tol = options.tol / 10.0;
  for (int it = 0; it < options.max_iter; ++it) {
    const Expanded e = expand(d, cur, Expansion::General);
    const wlasso::WlassoProblem prob{e.sqrt_d.asDiagonal() * d.design(), e.response, w};
    const Coefficients cand = wlasso::solve(prob, options.inner, &cur).beta;
    const Coefficients dir = cand - cur;
    // Proximal Newton direction; damp until the exact objective does not drop.
    double t = 1.0;
    Coefficients next = cand;
    double f_next = objective(next);
    while (f_next < f_cur && t > 1e-10) {
      t *= 0.5;
      next = cur + t * dir;
      f_next = objective(next);
    }
    if (f_next < f_cur) break;
    const double change = (next - cur).lpNorm<Eigen::Infinity>();
    cur = std::move(next);
    f_cur = f_next;
    if (change <= inner_tol) break;
  }
  return cur;
}

}  // namespace

WorkingData build_working_data_type1(const Dataset& d, const Coefficients& b0, const PenaltySpec& p,
                                     Expansion expansion, double weight_cap) {
  if (!is_type1(p)) throw FamilyMismatch("type 1 working data requires an Lq, Log or L1 penalty");
  const Expanded e = expand(d, b0, expansion);
  WorkingData wd;
  wd.design = Eigen::MatrixXd::Zero(d.n(), d.dim());
  wd.response = e.response;
  wd.scale = Eigen::VectorXd::Zero(d.dim());
  for (Eigen::Index j = 0; j < d.dim(); ++j) {
    if (!d.penalized(j)) {
      wd.unpenalized.push_back(j);
      wd.design.col(j) = e.sqrt_d.cwiseProduct(d.design().col(j));
      wd.scale[j] = 1.0;
      continue;
    }
    const double dp = unit_derivative(p, std::abs(b0[j]));
    if (!(dp <= weight_cap)) {
      wd.pinned.push_back(j);
      continue;
    }
    wd.penalized.push_back(j);
    wd.design.col(j) = e.sqrt_d.cwiseProduct(d.design().col(j)) / dp;
    wd.scale[j] = 1.0 / dp;
  }
  return wd;
}

WorkingData build_working_data_type2(const Dataset& d, const Coefficients& b0, const PenaltySpec& p,
                                     Expansion expansion) {
  if (!is_scad(p)) throw FamilyMismatch("type 2 working data requires the SCAD penalty");
  const Expanded e = expand(d, b0, expansion);
  WorkingData wd;
  wd.design.resize(d.n(), d.dim());
  wd.response = e.response;
  wd.scale = Eigen::VectorXd::Ones(d.dim());
  for (Eigen::Index j = 0; j < d.dim(); ++j) {
    wd.design.col(j) = e.sqrt_d.cwiseProduct(d.design().col(j));
    const double dp = d.penalized(j) ? derivative(p, std::abs(b0[j])) : 0.0;
    if (dp == 0.0) {
      wd.unpenalized.push_back(j);
    } else {
      wd.penalized.push_back(j);
      wd.scale[j] = p.lambda / dp;
      wd.design.col(j) *= wd.scale[j];
    }
  }

  const Eigen::MatrixXd xv = gather(wd.design, wd.penalized);
  if (wd.unpenalized.empty()) {
    wd.projected_response = wd.response;
    wd.projected_penalized = xv;
    return wd;
  }
  const Eigen::MatrixXd xu = gather(wd.design, wd.unpenalized);
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xu);
  if (cod.rank() < xu.cols()) {
    wd.warnings.push_back("SingularProjection: unpenalized block has rank " + std::to_string(cod.rank()) + " < " +
                          std::to_string(xu.cols()) + "; using pseudo-inverse");
  }
  wd.projected_response = wd.response - xu * cod.solve(wd.response);
  if (xv.cols() > 0) {
    wd.projected_penalized = xv - xu * cod.solve(xv);
  } else {
    wd.projected_penalized.resize(d.n(), 0);
  }
  return wd;
}

double penalized_loglik(const Dataset& d, const PenaltySpec& p, const Coefficients& beta) {
  double pen = 0.0;
  for (Eigen::Index j = d.offset(); j < beta.size(); ++j) pen += value(p, std::abs(beta[j]));
  return loglik(d, beta) - n_of(d) * pen;
}

FitResult one_step(const Dataset& d, const PenaltySpec& p, const std::optional<Coefficients>& b0,
                   const Options& options) {
  p.validate();
  std::vector<std::string> warnings;
  const Coefficients start = initial_estimate(d, b0, warnings);
  Recovered r = one_step_core(d, p, start, Expansion::AtMle, options, warnings);
  FitResult fit = make_result(d, std::move(r.beta), p.lambda, Method::OneStep);
  fit.kkt_residual = r.kkt;
  fit.iterations = 1;
  if (has_bounded_objective(p)) {
    fit.objective_trace = {penalized_loglik(d, p, start), penalized_loglik(d, p, fit.coefficients)};
  }
  fit.warnings = std::move(warnings);
  return fit;
}

FitResult k_step(const Dataset& d, const PenaltySpec& p, const std::optional<Coefficients>& b0, int k,
                 const Options& options) {
  if (k < 1) throw std::invalid_argument("k_step: k must be >= 1");
  p.validate();
  std::vector<std::string> warnings;
  Coefficients cur = initial_estimate(d, b0, warnings);
  std::vector<double> trace;
  const bool bounded = has_bounded_objective(p);
  if (bounded) trace.push_back(penalized_loglik(d, p, cur));
  double kkt = 0.0;
  for (int step = 1; step <= k; ++step) {
    const Expansion e = step == 1 ? Expansion::AtMle : Expansion::General;
    Recovered r = one_step_core(d, p, cur, e, options, warnings);
    cur = std::move(r.beta);
    kkt = r.kkt;
    if (bounded) trace.push_back(penalized_loglik(d, p, cur));
  }
  FitResult fit = make_result(d, std::move(cur), p.lambda, k == 1 ? Method::OneStep : Method::KStep);
  fit.steps = k;
  fit.iterations = k;
  fit.kkt_residual = kkt;
  fit.objective_trace = std::move(trace);
  fit.warnings = std::move(warnings);
  return fit;
}

FitResult full_lla(const Dataset& d, const PenaltySpec& p, const std::optional<Coefficients>& b0,
                   const Options& options) {
  p.validate();
  if (!has_bounded_objective(p)) {
    throw FamilyMismatch("full_lla requires SCAD or L1; use one_step for Lq and Log");
  }
  std::vector<std::string> warnings;
  Coefficients cur = initial_estimate(d, b0, warnings);
  std::vector<double> trace{penalized_loglik(d, p, cur)};
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d.dim());
  bool converged = false;
  int iter = 0;
  while (iter < options.max_iter) {
    ++iter;
    for (Eigen::Index j = d.offset(); j < d.dim(); ++j) w[j] = n_of(d) * derivative(p, std::abs(cur[j]));
    Coefficients next = maximize_weighted(d, w, cur, options);
    const double change = (next - cur).lpNorm<Eigen::Infinity>();
    cur = std::move(next);
    trace.push_back(penalized_loglik(d, p, cur));
    if (change <= options.tol) {
      converged = true;
      break;
    }
  }
  FitResult fit = make_result(d, std::move(cur), p.lambda, Method::FullLla);
  fit.iterations = iter;
  fit.converged = converged;
  fit.objective_trace = std::move(trace);
  if (!converged) warnings.push_back("full_lla: reached max_iter without convergence");
  fit.warnings = std::move(warnings);
  return fit;
}

double lambda_max(const Dataset& d, const PenaltySpec& family, const Coefficients& b0) {
  const Expanded e = expand(d, b0, Expansion::AtMle);
  const Eigen::MatrixXd xs = e.sqrt_d.asDiagonal() * d.design();
  Eigen::VectorXd resid = e.response;
  if (d.offset() > 0) {
    const Eigen::MatrixXd xu = xs.leftCols(d.offset());
    resid -= xu * xu.completeOrthogonalDecomposition().solve(resid);
  }
  const double n = n_of(d);
  double best = 0.0;
  for (Eigen::Index j = d.offset(); j < d.dim(); ++j) {
    const double g = std::abs(xs.col(j).dot(resid));
    if (is_scad(family)) {
      best = std::max({best, g / n, std::abs(b0[j])});
    } else {
      const double dp = unit_derivative(family, std::abs(b0[j]));
      if (std::isfinite(dp) && dp > 0.0) best = std::max(best, g / (n * dp));
    }
  }
  return best * (1.0 + 1e-9);
}

std::vector<FitResult> one_step_path(const Dataset& d, const PenaltySpec& family, std::span<const double> grid,
                                     const Coefficients& b0, const Options& options) {
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] < grid[k - 1])) throw std::invalid_argument("one_step_path: grid must be strictly descending");
  }
  std::vector<FitResult> path;
  path.reserve(grid.size());
  if (is_scad(family)) {
    for (const double lam : grid) path.push_back(one_step(d, family.with_lambda(lam), b0, options));
    return path;
  }
  const WorkingData wd = build_working_data_type1(d, b0, family, Expansion::AtMle, options.weight_cap);
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(d.dim());
  for (const double lam : grid) {
    Recovered r = solve_type1(wd, n_of(d) * lam, options.inner, &warm);
    // Warm start in working units.
    for (Eigen::Index j = 0; j < d.dim(); ++j) warm[j] = wd.scale[j] != 0.0 ? r.beta[j] / wd.scale[j] : 0.0;
    FitResult fit = make_result(d, std::move(r.beta), lam, Method::OneStep);
    fit.kkt_residual = r.kkt;
    fit.iterations = 1;
    path.push_back(std::move(fit));
  }
  return path;
}

}  // namespace sparsefit::lla
