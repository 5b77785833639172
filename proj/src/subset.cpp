#include "sparsefit/subset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sparsefit/error.hpp"

namespace sparsefit::subset {

namespace {

std::vector<Eigen::Index> design_columns(const Dataset& d, std::span<const Eigen::Index> predictors) {
  std::vector<Eigen::Index> cols;
  if (d.intercept()) cols.push_back(0);
  for (const auto j : predictors) {
    if (j < 0 || j >= d.predictors()) throw DimensionMismatch("subset: predictor index out of range");
    cols.push_back(j + d.offset());
  }
  return cols;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = x.col(cols[k]);
  return out;
}

struct SubsetFit {
  Eigen::VectorXd beta;  // on the gathered columns
  double twice_ll = 0.0;
};

SubsetFit fit_subset(const Dataset& d, const std::vector<Eigen::Index>& cols) {
  const Eigen::MatrixXd x = gather(d.design(), cols);
  SubsetFit out;
  if (d.family() == Family::Gaussian) {
    Eigen::VectorXd resid = d.response();
    out.beta = Eigen::VectorXd(0);
    if (x.cols() > 0) {
      out.beta = x.completeOrthogonalDecomposition().solve(d.response());
      resid -= x * out.beta;
    }
    const double n = static_cast<double>(d.n());
    const double rss = resid.squaredNorm();
    out.twice_ll = rss > 0.0 ? -n * std::log(rss / n) : std::numeric_limits<double>::infinity();
    return out;
  }
  const MleFit mle = fit_mle(d.family(), x, d.response());
  out.beta = mle.beta;
  out.twice_ll = 2.0 * mle.loglik;
  return out;
}

}  // namespace

Criterion parse_criterion(std::string_view name) {
  if (name == "aic" || name == "AIC") return Criterion::Aic;
  if (name == "bic" || name == "BIC") return Criterion::Bic;
  throw ParseError("unknown criterion '" + std::string(name) + "'");
}

std::string criterion_name(Criterion c) { return c == Criterion::Aic ? "aic" : "bic"; }

double criterion_penalty(Criterion c, Eigen::Index n) {
  return c == Criterion::Aic ? 2.0 : std::log(static_cast<double>(n));
}

double twice_loglik(const Dataset& d, std::span<const Eigen::Index> predictors) {
  return fit_subset(d, design_columns(d, predictors)).twice_ll;
}

double score(const Dataset& d, Criterion c, std::span<const Eigen::Index> predictors) {
  return twice_loglik(d, predictors) - criterion_penalty(c, d.n()) * static_cast<double>(predictors.size());
}

FitResult best_subset(const Dataset& d, Criterion c, int max_p) {
  const Eigen::Index p = d.predictors();
  if (p > max_p) {
    throw TooManyPredictors("best subset: p = " + std::to_string(p) + " exceeds max_p = " + std::to_string(max_p));
  }
  const double pen = criterion_penalty(c, d.n());

  std::vector<Eigen::Index> best_set;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::string> warnings;
  bool have_best = false;
  // Sizes ascending, combinations in lexicographic order; only a strictly
  // better score replaces the incumbent.
  for (Eigen::Index k = 0; k <= p; ++k) {
    std::vector<bool> chosen(static_cast<std::size_t>(p), false);
    std::fill(chosen.begin(), chosen.begin() + k, true);
    do {
      std::vector<Eigen::Index> set;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (chosen[static_cast<std::size_t>(j)]) set.push_back(j);
      }
      double s = -std::numeric_limits<double>::infinity();
      try {
        s = fit_subset(d, design_columns(d, set)).twice_ll - pen * static_cast<double>(k);
      } catch (const NonConvergence& e) {
        warnings.push_back(std::string("subset skipped: ") + e.what());
      }
      if (!have_best || s > best) {
        best = s;
        best_set = set;
        have_best = true;
      }
    } while (std::prev_permutation(chosen.begin(), chosen.end()));
  }

  const auto cols = design_columns(d, best_set);
  const SubsetFit fit = fit_subset(d, cols);
  FitResult result;
  result.coefficients = Coefficients::Zero(d.dim());
  for (std::size_t k = 0; k < cols.size(); ++k) result.coefficients[cols[k]] = fit.beta[static_cast<Eigen::Index>(k)];
  // A fitted coefficient that is exactly zero still belongs to the model.
  result.has_intercept = d.intercept();
  result.support = best_set;
  result.lambda = pen;
  result.method = Method::Subset;
  result.objective_trace = {best};
  result.iterations = 1;
  result.warnings = std::move(warnings);
  return result;
}

}  // namespace sparsefit::subset
