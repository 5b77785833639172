#include "sparsefit/glm.hpp"

#include <cmath>
#include <utility>

#include "sparsefit/error.hpp"

namespace sparsefit {

namespace {

// log(1 + e^mu) without overflow.
double softplus(double mu) { return mu > 0.0 ? mu + std::log1p(std::exp(-mu)) : std::log1p(std::exp(mu)); }

double logistic(double mu) {
  if (mu >= 0.0) return 1.0 / (1.0 + std::exp(-mu));
  const double e = std::exp(mu);
  return e / (1.0 + e);
}

constexpr double kSingularRcond = 1e-12;
constexpr double kSeparationEta = 30.0;

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw DataError(std::string(what) + " contains non-finite entries");
}

struct NewtonOutcome {
  Eigen::VectorXd beta;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  bool singular = false;
};

// Maximizes l(beta) - ridge/2 |beta|^2.
NewtonOutcome newton(Family f, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double ridge,
                     const MleOptions& opt) {
  const Eigen::Index p = x.cols();
  NewtonOutcome out;
  out.beta = Eigen::VectorXd::Zero(p);
  auto objective = [&](const Eigen::VectorXd& b) { return loglik(f, x, y, b) - 0.5 * ridge * b.squaredNorm(); };
  out.objective = objective(out.beta);

  Eigen::VectorXd mu(x.rows()), s(x.rows()), w(x.rows());
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    mu.noalias() = x * out.beta;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      s[i] = unit_score(f, y[i], mu[i]);
      w[i] = unit_curvature(f, y[i], mu[i]);
    }
    Eigen::VectorXd g = x.transpose() * s - ridge * out.beta;
    if (g.lpNorm<Eigen::Infinity>() <= opt.grad_tol) {
      out.converged = true;
      return out;
    }
    Eigen::MatrixXd h = x.transpose() * w.asDiagonal() * x;
    h.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success || llt.rcond() < kSingularRcond) {
      out.singular = true;
      return out;
    }
    Eigen::VectorXd step = llt.solve(g);
    out.iterations = iter + 1;

    double t = 1.0;
    Eigen::VectorXd trial = out.beta + step;
    double trial_obj = objective(trial);
    for (int halving = 0; halving < 40 && !(trial_obj >= out.objective); ++halving) {
      t *= 0.5;
      trial = out.beta + t * step;
      trial_obj = objective(trial);
    }
    if (!(trial_obj >= out.objective)) {
      // No ascent possible at working precision: stationary up to rounding.
      out.converged = g.lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + std::abs(out.objective));
      return out;
    }
    const double change = (t * step).lpNorm<Eigen::Infinity>();
    out.beta = std::move(trial);
    out.objective = trial_obj;
    if (f == Family::Gaussian && ridge == 0.0) {
      // Quadratic objective: one full Newton step lands on the optimum.
      out.converged = true;
      return out;
    }
    if (change <= 1e-13 * (1.0 + out.beta.lpNorm<Eigen::Infinity>())) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

}  // namespace

Family parse_family(std::string_view name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "logistic" || name == "binomial") return Family::Logistic;
  if (name == "poisson") return Family::Poisson;
  throw ParseError("unknown family '" + std::string(name) + "'");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Gaussian:
      return "gaussian";
    case Family::Logistic:
      return "logistic";
    case Family::Poisson:
      return "poisson";
  }
  return "unknown";
}

Dataset::Dataset(Eigen::MatrixXd predictors, Eigen::VectorXd response, Family family, bool intercept,
                 std::vector<std::string> names)
    : response_(std::move(response)), family_(family), intercept_(intercept), names_(std::move(names)) {
  if (predictors.rows() < 1 || predictors.cols() < 1) throw DataError("dataset needs n >= 1 and p >= 1");
  if (predictors.rows() != response_.size()) {
    throw DimensionMismatch("design has " + std::to_string(predictors.rows()) + " rows but response has " +
                            std::to_string(response_.size()));
  }
  check_finite(predictors, "design");
  check_finite(response_, "response");
  for (Eigen::Index i = 0; i < response_.size(); ++i) {
    const double yi = response_[i];
    if (family_ == Family::Logistic && yi != 0.0 && yi != 1.0) {
      throw DataError("logistic response must be 0 or 1 (row " + std::to_string(i + 1) + ")");
    }
    if (family_ == Family::Poisson && (yi < 0.0 || yi != std::floor(yi))) {
      throw DataError("poisson response must be a nonnegative integer (row " + std::to_string(i + 1) + ")");
    }
  }
  if (!names_.empty() && static_cast<Eigen::Index>(names_.size()) != predictors.cols()) {
    throw DimensionMismatch("predictor names do not match design width");
  }
  if (intercept_) {
    design_.resize(predictors.rows(), predictors.cols() + 1);
    design_.col(0).setOnes();
    design_.rightCols(predictors.cols()) = predictors;
  } else {
    design_ = std::move(predictors);
  }
}

Dataset Dataset::rows(std::span<const Eigen::Index> index) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(index.size()), predictors());
  Eigen::VectorXd y(static_cast<Eigen::Index>(index.size()));
  for (std::size_t k = 0; k < index.size(); ++k) {
    const auto i = index[k];
    x.row(static_cast<Eigen::Index>(k)) = design_.row(i).tail(predictors());
    y[static_cast<Eigen::Index>(k)] = response_[i];
  }
  return Dataset(std::move(x), std::move(y), family_, intercept_, names_);
}

double unit_loglik(Family f, double y, double mu) {
  switch (f) {
    case Family::Gaussian:
      return -0.5 * (y - mu) * (y - mu);
    case Family::Logistic:
      return y * mu - softplus(mu);
    case Family::Poisson:
      return y * mu - std::exp(mu) - std::lgamma(y + 1.0);
  }
  return 0.0;
}

double unit_score(Family f, double y, double mu) {
  switch (f) {
    case Family::Gaussian:
      return y - mu;
    case Family::Logistic:
      return y - logistic(mu);
    case Family::Poisson:
      return y - std::exp(mu);
  }
  return 0.0;
}

double unit_curvature(Family f, double /*y*/, double mu) {
  switch (f) {
    case Family::Gaussian:
      return 1.0;
    case Family::Logistic: {
      const double p = logistic(mu);
      return p * (1.0 - p);
    }
    case Family::Poisson:
      return std::exp(mu);
  }
  return 0.0;
}

double loglik(Family f, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  if (x.cols() != beta.size() || x.rows() != y.size()) throw DimensionMismatch("loglik: dimension mismatch");
  double total = 0.0;
  if (x.cols() == 0) {
    for (Eigen::Index i = 0; i < y.size(); ++i) total += unit_loglik(f, y[i], 0.0);
    return total;
  }
  const Eigen::VectorXd mu = x * beta;
  for (Eigen::Index i = 0; i < y.size(); ++i) total += unit_loglik(f, y[i], mu[i]);
  return total;
}

double loglik(const Dataset& d, const Coefficients& b) { return loglik(d.family(), d.design(), d.response(), b); }

Eigen::VectorXd score_residuals(const Dataset& d, const Coefficients& b) {
  if (b.size() != d.dim()) throw DimensionMismatch("score: dimension mismatch");
  const Eigen::VectorXd mu = d.design() * b;
  Eigen::VectorXd s(d.n());
  for (Eigen::Index i = 0; i < d.n(); ++i) s[i] = unit_score(d.family(), d.response()[i], mu[i]);
  return s;
}

Eigen::VectorXd gradient(const Dataset& d, const Coefficients& b) {
  return d.design().transpose() * score_residuals(d, b);
}

Eigen::VectorXd curvature_weights(const Dataset& d, const Coefficients& b) {
  if (b.size() != d.dim()) throw DimensionMismatch("curvature: dimension mismatch");
  const Eigen::VectorXd mu = d.design() * b;
  Eigen::VectorXd w(d.n());
  for (Eigen::Index i = 0; i < d.n(); ++i) w[i] = unit_curvature(d.family(), d.response()[i], mu[i]);
  return w;
}

Eigen::MatrixXd neg_hessian(const Dataset& d, const Coefficients& b) {
  const Eigen::VectorXd w = curvature_weights(d, b);
  Eigen::MatrixXd h = d.design().transpose() * w.asDiagonal() * d.design();
  // Symmetrize away rounding noise.
  return 0.5 * (h + h.transpose());
}

MleFit fit_mle(Family f, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const MleOptions& options) {
  if (x.rows() != y.size()) throw DimensionMismatch("fit_mle: dimension mismatch");
  MleFit fit;
  if (x.cols() == 0) {
    fit.beta = Eigen::VectorXd(0);
    fit.loglik = loglik(f, x, y, fit.beta);
    return fit;
  }

  NewtonOutcome out = newton(f, x, y, 0.0, options);
  // Separated logistic data: the likelihood keeps rising as |beta| grows and
  // the fitted probabilities saturate.
  if (out.converged && f == Family::Logistic && (x * out.beta).lpNorm<Eigen::Infinity>() > kSeparationEta) {
    out.converged = false;
  }
  if (!out.converged) {
    if (!options.ridge_fallback) {
      if (out.singular) throw SingularDesign("fit_mle: X'DX is numerically singular");
      throw NonConvergence("fit_mle: Newton-Raphson did not converge in " + std::to_string(options.max_iter) +
                           " iterations");
    }
    // Ridge scaled to the curvature at beta = 0.
    Eigen::VectorXd w0(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) w0[i] = unit_curvature(f, y[i], 0.0);
    const double mean_diag = (x.array().square().colwise() * w0.array()).colwise().sum().mean();
    const double ridge = 1e-6 * (mean_diag > 0.0 ? mean_diag : 1.0);
    fit.warnings.push_back(std::string("fit_mle: ") + (out.singular ? "singular system" : "no convergence") +
                           "; refit with ridge " + std::to_string(ridge));
    out = newton(f, x, y, ridge, options);
    fit.ridge_applied = true;
    if (!out.converged) {
      throw NonConvergence("fit_mle: ridge-stabilized Newton-Raphson did not converge");
    }
  }
  fit.beta = std::move(out.beta);
  fit.iterations = out.iterations;
  fit.loglik = loglik(f, x, y, fit.beta);
  return fit;
}

MleFit fit_mle(const Dataset& d, const MleOptions& options) {
  return fit_mle(d.family(), d.design(), d.response(), options);
}

}  // namespace sparsefit
