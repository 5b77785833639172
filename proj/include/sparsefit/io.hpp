#pragma once

#include <Eigen/Dense>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "sparsefit/fit_result.hpp"
#include "sparsefit/glm.hpp"
#include "sparsefit/penalty.hpp"
#include "sparsefit/tuning.hpp"

namespace sparsefit::io {

struct Table {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Comma separated numbers under one header line. Throws DataError on ragged
/// rows or non-numeric cells.
Table read_csv(std::istream& in);
Table read_csv_file(const std::string& path);

/// Builds a data set from the `response` column and every other column (or
/// only `predictors` when given, in that order). Throws DataError when a
/// column is missing.
Dataset to_dataset(const Table& table, const std::string& response, Family family, bool intercept,
                   const std::optional<std::vector<std::string>>& predictors = std::nullopt);

// %.17g
std::string format_number(double v);

/// JSON document with schema "sparsefit/1". Support indices are 1-based and
/// the intercept, if any, is reported separately from the coefficients.
std::string fit_to_json(const FitResult& fit, const Dataset& d, const std::optional<PenaltySpec>& penalty);

// lambda,<names...> header, one row per fit; empty cells for failed fits.
std::string path_to_csv(const std::vector<double>& grid, const std::vector<std::optional<FitResult>>& fits,
                        const Dataset& d);

// lambda,loss rows followed by "# lambda_star,<value>".
std::string cv_to_csv(const tuning::CvResult& cv);

}  // namespace sparsefit::io
