#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sparsefit {

enum class Family { Gaussian, Logistic, Poisson };

Family parse_family(std::string_view name);
std::string family_name(Family f);

// Coefficient vectors index the columns of Dataset::design(), so an enabled
// intercept occupies slot 0.
using Coefficients = Eigen::VectorXd;

/// Immutable regression data set. The design stored here is the working
/// design: when an intercept is requested a leading column of ones is added
/// and that coordinate is never penalized.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd predictors, Eigen::VectorXd response, Family family, bool intercept = false,
          std::vector<std::string> names = {});

  const Eigen::MatrixXd& design() const { return design_; }
  const Eigen::VectorXd& response() const { return response_; }
  Family family() const { return family_; }
  bool intercept() const { return intercept_; }

  Eigen::Index n() const { return design_.rows(); }
  Eigen::Index dim() const { return design_.cols(); }
  Eigen::Index predictors() const { return dim() - offset(); }
  // Index of the first predictor column in design().
  Eigen::Index offset() const { return intercept_ ? 1 : 0; }
  bool penalized(Eigen::Index column) const { return column >= offset(); }

  const std::vector<std::string>& names() const { return names_; }

  Eigen::MatrixXd predictor_block() const { return design_.rightCols(predictors()); }

  Dataset rows(std::span<const Eigen::Index> index) const;

 private:
  Eigen::MatrixXd design_;
  Eigen::VectorXd response_;
  Family family_;
  bool intercept_;
  std::vector<std::string> names_;
};

// Per-observation pieces as functions of the linear predictor mu.
// Gaussian uses l = -(y - mu)^2 / 2, so its curvature is 1.
double unit_loglik(Family f, double y, double mu);
double unit_score(Family f, double y, double mu);      // d l / d mu
double unit_curvature(Family f, double y, double mu);  // -d^2 l / d mu^2

double loglik(Family f, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);
double loglik(const Dataset& d, const Coefficients& b);

Eigen::VectorXd gradient(const Dataset& d, const Coefficients& b);

/// Diagonal of D, with D_ii = -l_i''(mu_i) at mu_i = x_i' b.
Eigen::VectorXd curvature_weights(const Dataset& d, const Coefficients& b);

/// Score residuals l_i'(mu_i).
Eigen::VectorXd score_residuals(const Dataset& d, const Coefficients& b);

/// X' D X.
Eigen::MatrixXd neg_hessian(const Dataset& d, const Coefficients& b);

struct MleOptions {
  double grad_tol = 1e-10;
  int max_iter = 100;
  // Retry with a tiny ridge when the Newton system is singular or the
  // iteration diverges (separable logistic data).
  bool ridge_fallback = true;
};

struct MleFit {
  Coefficients beta;
  double loglik = 0.0;
  int iterations = 0;
  bool ridge_applied = false;
  std::vector<std::string> warnings;
};

/// Unpenalized maximum likelihood by Newton-Raphson with step halving.
/// Gaussian data take a single linear solve. Throws SingularDesign or
/// NonConvergence when ridge_fallback is off.
MleFit fit_mle(const Dataset& d, const MleOptions& options = {});
MleFit fit_mle(Family f, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const MleOptions& options = {});

}  // namespace sparsefit
