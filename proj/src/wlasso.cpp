#include "sparsefit/wlasso.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sparsefit/error.hpp"

namespace sparsefit::wlasso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double soft(double z, double v) {
  if (z > v) return z - v;
  if (z < -v) return z + v;
  return 0.0;
}

// Coordinate descent state restricted to the finite-weight columns.
class GramSolver {
 public:
  GramSolver(const WlassoProblem& prob, const std::vector<Eigen::Index>& cols) : cols_(cols) {
    const auto m = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXd xa(prob.design.rows(), m);
    v_.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      xa.col(k) = prob.design.col(cols[static_cast<std::size_t>(k)]);
      v_[k] = prob.weights[cols[static_cast<std::size_t>(k)]];
    }
    gram_.noalias() = xa.transpose() * xa;
    c_.noalias() = xa.transpose() * prob.response;
    yy_ = prob.response.squaredNorm();
    beta_ = Eigen::VectorXd::Zero(m);
    g_ = c_;
  }

  void warm(const Eigen::VectorXd& full) {
    for (Eigen::Index k = 0; k < beta_.size(); ++k) beta_[k] = full[cols_[static_cast<std::size_t>(k)]];
    refresh_gradient();
  }

  void refresh_gradient() { g_.noalias() = c_ - gram_ * beta_; }

  // One pass over all coordinates, or only the nonzero ones. Returns the
  // largest move in gradient units.
  double sweep(bool active_only) {
    double max_move = 0.0;
    for (Eigen::Index k = 0; k < beta_.size(); ++k) {
      if (active_only && beta_[k] == 0.0) continue;
      const double gkk = gram_(k, k);
      if (gkk <= 0.0) continue;
      const double old = beta_[k];
      const double z = g_[k] + gkk * old;
      const double next = soft(z, v_[k]) / gkk;
      const double delta = next - old;
      if (delta != 0.0) {
        beta_[k] = next;
        g_.noalias() -= gram_.col(k) * delta;
        max_move = std::max(max_move, gkk * std::abs(delta));
      }
    }
    return max_move;
  }

  double kkt() const {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < beta_.size(); ++k) {
      const double viol = beta_[k] == 0.0 ? std::max(std::abs(g_[k]) - v_[k], 0.0)
                                          : std::abs(g_[k] - v_[k] * (beta_[k] > 0.0 ? 1.0 : -1.0));
      worst = std::max(worst, viol);
    }
    return worst;
  }

  double objective() const {
    double pen = 0.0;
    for (Eigen::Index k = 0; k < beta_.size(); ++k) {
      if (beta_[k] != 0.0) pen += v_[k] * std::abs(beta_[k]);
    }
    return 0.5 * yy_ - c_.dot(beta_) + 0.5 * beta_.dot(gram_ * beta_) + pen;
  }

  Eigen::VectorXd expand(Eigen::Index p) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(p);
    for (Eigen::Index k = 0; k < beta_.size(); ++k) full[cols_[static_cast<std::size_t>(k)]] = beta_[k];
    return full;
  }

 private:
  const std::vector<Eigen::Index>& cols_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd c_, v_, beta_, g_;
  double yy_ = 0.0;
};

}  // namespace

void WlassoProblem::validate() const {
  if (design.rows() != response.size() || design.cols() != weights.size()) {
    throw DimensionMismatch("wlasso: design is " + std::to_string(design.rows()) + "x" +
                            std::to_string(design.cols()) + ", response " + std::to_string(response.size()) +
                            ", weights " + std::to_string(weights.size()));
  }
  if (!design.allFinite() || !response.allFinite()) throw DataError("wlasso: non-finite working data");
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    if (!(weights[j] >= 0.0)) throw DataError("wlasso: weights must be nonnegative");
  }
}

double objective(const WlassoProblem& prob, const Eigen::VectorXd& beta) {
  double pen = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta[j] == 0.0) continue;
    if (std::isinf(prob.weights[j])) return kInf;
    pen += prob.weights[j] * std::abs(beta[j]);
  }
  return 0.5 * (prob.response - prob.design * beta).squaredNorm() + pen;
}

WlassoSolution solve(const WlassoProblem& prob, const SolveOptions& options, const Eigen::VectorXd* warm_start) {
  prob.validate();
  if (!(options.tol > 0.0)) throw std::invalid_argument("wlasso: tol must be positive");
  const Eigen::Index p = prob.design.cols();

  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (std::isfinite(prob.weights[j])) cols.push_back(j);
  }

  WlassoSolution sol;
  GramSolver cd(prob, cols);
  if (warm_start != nullptr && warm_start->size() == p) cd.warm(*warm_start);
  if (options.record_trace) sol.trace.push_back(cd.objective());

  const double tol = options.tol;
  bool done = cols.empty();
  while (!done) {
    if (sol.sweeps >= options.max_sweeps) {
      throw NonConvergence("wlasso: no convergence after " + std::to_string(options.max_sweeps) + " sweeps");
    }
    const double full_move = cd.sweep(false);
    ++sol.sweeps;
    if (options.record_trace) sol.trace.push_back(cd.objective());
    if (full_move <= tol) {
      cd.refresh_gradient();
      if (cd.kkt() <= 10.0 * tol) {
        done = true;
        break;
      }
      continue;
    }
    // Iterate on the current support until it settles, then re-check all.
    while (sol.sweeps < options.max_sweeps) {
      const double move = cd.sweep(true);
      ++sol.sweeps;
      if (options.record_trace) sol.trace.push_back(cd.objective());
      if (move <= tol) break;
    }
  }

  sol.beta = cd.expand(p);
  sol.objective = objective(prob, sol.beta);
  sol.kkt_residual = certify_kkt(prob, sol.beta);
  return sol;
}

double certify_kkt(const WlassoProblem& prob, const Eigen::VectorXd& beta) {
  if (beta.size() != prob.design.cols()) throw DimensionMismatch("certify_kkt: dimension mismatch");
  const Eigen::VectorXd g = prob.design.transpose() * (prob.response - prob.design * beta);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double v = prob.weights[j];
    double viol = 0.0;
    if (std::isinf(v)) {
      viol = beta[j] == 0.0 ? 0.0 : kInf;
    } else if (beta[j] == 0.0) {
      viol = std::max(std::abs(g[j]) - v, 0.0);
    } else {
      viol = std::abs(g[j] - v * (beta[j] > 0.0 ? 1.0 : -1.0));
    }
    worst = std::max(worst, viol);
  }
  return worst;
}

double lambda_max(const WlassoProblem& unit_profile) {
  unit_profile.validate();
  const auto& x = unit_profile.design;
  const auto& u = unit_profile.weights;
  std::vector<Eigen::Index> free_cols;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    if (u[j] == 0.0) free_cols.push_back(j);
  }
  Eigen::VectorXd resid = unit_profile.response;
  if (!free_cols.empty()) {
    Eigen::MatrixXd xu(x.rows(), static_cast<Eigen::Index>(free_cols.size()));
    for (std::size_t k = 0; k < free_cols.size(); ++k) xu.col(static_cast<Eigen::Index>(k)) = x.col(free_cols[k]);
    const Eigen::VectorXd bu = xu.completeOrthogonalDecomposition().solve(resid);
    resid -= xu * bu;
  }
  double best = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    if (u[j] > 0.0 && std::isfinite(u[j])) best = std::max(best, std::abs(x.col(j).dot(resid)) / u[j]);
  }
  // Nudge up so rounding in the solver cannot leave a 1e-16 coefficient at
  // the threshold itself.
  return best * (1.0 + 1e-9);
}

std::vector<double> default_grid(double lambda_max, int count, double ratio) {
  std::vector<double> grid;
  if (count <= 0 || !(lambda_max > 0.0)) return grid;
  grid.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    grid.push_back(lambda_max);
    return grid;
  }
  const double step = std::log(ratio) / static_cast<double>(count - 1);
  for (int k = 0; k < count; ++k) grid.push_back(lambda_max * std::exp(step * static_cast<double>(k)));
  return grid;
}

std::vector<WlassoSolution> solve_path(const WlassoProblem& unit_profile, std::span<const double> lambda_grid,
                                       const SolveOptions& options) {
  for (std::size_t k = 1; k < lambda_grid.size(); ++k) {
    if (!(lambda_grid[k] < lambda_grid[k - 1])) throw std::invalid_argument("solve_path: grid must be strictly descending");
  }
  std::vector<WlassoSolution> path;
  path.reserve(lambda_grid.size());
  WlassoProblem prob = unit_profile;
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(unit_profile.design.cols());
  for (const double lam : lambda_grid) {
    for (Eigen::Index j = 0; j < prob.weights.size(); ++j) {
      const double u = unit_profile.weights[j];
      prob.weights[j] = u == 0.0 ? 0.0 : (std::isinf(u) ? kInf : lam * u);
    }
    path.push_back(solve(prob, options, &warm));
    warm = path.back().beta;
  }
  return path;
}

}  // namespace sparsefit::wlasso
