#include "sparsefit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sparsefit/error.hpp"

namespace sparsefit::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> column_names(const Dataset& d) {
  std::vector<std::string> names = d.names();
  if (names.size() != static_cast<std::size_t>(d.predictors())) {
    names.clear();
    for (Eigen::Index j = 1; j <= d.predictors(); ++j) names.push_back("x" + std::to_string(j));
  }
  return names;
}

}  // namespace

Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  while (std::getline(in, line) && trim(line).empty()) {
  }
  if (trim(line).empty()) throw DataError("csv: no header line");
  t.header = split(line);
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw DataError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                      " fields, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (c.empty() || used != c.size()) {
        throw DataError("csv line " + std::to_string(lineno) + ": non-numeric field '" + c + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < t.header.size(); ++j) {
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return t;
}

Table read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv(in);
}

Dataset to_dataset(const Table& table, const std::string& response, Family family, bool intercept,
                   const std::optional<std::vector<std::string>>& predictors) {
  auto find = [&](const std::string& name) -> Eigen::Index {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (table.header[j] == name) return static_cast<Eigen::Index>(j);
    }
    throw DataError("column '" + name + "' not found");
  };
  const Eigen::Index yc = find(response);
  std::vector<Eigen::Index> cols;
  std::vector<std::string> names;
  if (predictors) {
    for (const auto& name : *predictors) {
      cols.push_back(find(name));
      names.push_back(name);
    }
  } else {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (static_cast<Eigen::Index>(j) == yc) continue;
      cols.push_back(static_cast<Eigen::Index>(j));
      names.push_back(table.header[j]);
    }
  }
  Eigen::MatrixXd x(table.values.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) x.col(static_cast<Eigen::Index>(k)) = table.values.col(cols[k]);
  return Dataset(std::move(x), table.values.col(yc), family, intercept, std::move(names));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fit_to_json(const FitResult& fit, const Dataset& d, const std::optional<PenaltySpec>& penalty) {
  nlohmann::ordered_json j;
  j["schema"] = "sparsefit/1";
  j["method"] = method_name(fit);
  j["family"] = family_name(d.family());
  if (penalty) j["penalty"] = to_string(*penalty);
  j["lambda"] = fit.lambda;
  j["converged"] = fit.converged;
  if (fit.has_intercept) {
    j["intercept"] = fit.intercept();
  } else {
    j["intercept"] = nullptr;
  }
  const Eigen::VectorXd b = fit.predictor_coefficients();
  j["names"] = column_names(d);
  j["coefficients"] = std::vector<double>(b.data(), b.data() + b.size());
  std::vector<Eigen::Index> support;
  for (const auto s : fit.support) support.push_back(s + 1);
  j["support"] = support;
  j["iterations"] = fit.iterations;
  j["objective_trace"] = fit.objective_trace;
  j["kkt_residual"] = fit.kkt_residual;
  j["warnings"] = fit.warnings;
  return j.dump(2) + "\n";
}

std::string path_to_csv(const std::vector<double>& grid, const std::vector<std::optional<FitResult>>& fits,
                        const Dataset& d) {
  std::ostringstream out;
  out << "lambda";
  if (d.intercept()) out << ",intercept";
  for (const auto& name : column_names(d)) out << "," << name;
  out << "\n";
  for (std::size_t g = 0; g < grid.size(); ++g) {
    out << format_number(grid[g]);
    for (Eigen::Index j = 0; j < d.dim(); ++j) {
      out << ",";
      if (g < fits.size() && fits[g]) out << format_number(fits[g]->coefficients[j]);
    }
    out << "\n";
  }
  return out.str();
}

std::string cv_to_csv(const tuning::CvResult& cv) {
  std::ostringstream out;
  out << "lambda,loss\n";
  for (const auto& pt : cv.curve) out << format_number(pt.lambda) << "," << format_number(pt.loss) << "\n";
  out << "# lambda_star," << format_number(cv.lambda_star) << "\n";
  return out.str();
}

}  // namespace sparsefit::io
