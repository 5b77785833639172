#include "sparsefit/fit_result.hpp"

namespace sparsefit {

std::vector<Eigen::Index> support_of(const Eigen::VectorXd& coefficients, Eigen::Index offset) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = offset; j < coefficients.size(); ++j) {
    if (coefficients[j] != 0.0) support.push_back(j - offset);
  }
  return support;
}

std::string method_name(const FitResult& fit) {
  switch (fit.method) {
    case Method::OneStep:
      return "one_step";
    case Method::KStep:
      return "k_step(" + std::to_string(fit.steps) + ")";
    case Method::FullLla:
      return "full_lla";
    case Method::Lqa:
      return "lqa";
    case Method::PerturbedLqa:
      return "perturbed_lqa";
    case Method::Subset:
      return "subset";
  }
  return "unknown";
}

}  // namespace sparsefit
