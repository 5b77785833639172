#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sparsefit/glm.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SPARSEFIT_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("sparsefit_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

// y = 1 + 2 x1 - x2 + noise, and x3 unrelated.
fs::path toy_csv(Eigen::MatrixXd* x_out = nullptr, Eigen::VectorXd* y_out = nullptr) {
  const fs::path file = scratch() / "toy.csv";
  std::mt19937_64 g(17);
  std::normal_distribution<double> normal;
  const int n = 40;
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  std::ofstream out(file);
  out.precision(17);
  out << "x1,y,x2,x3\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = normal(g);
    y[i] = 2.0 * x(i, 0) - x(i, 1) + 0.5 * normal(g);
    out << x(i, 0) << "," << y[i] << "," << x(i, 1) << "," << x(i, 2) << "\n";
  }
  if (x_out) *x_out = x;
  if (y_out) *y_out = y;
  return file;
}

}  // namespace

TEST_CASE("fit at lambda = 0 is least squares") {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  const fs::path data = toy_csv(&x, &y);
  const Run r = run("fit --data " + data.string() +
                    " --response y --family gaussian --method one-step --penalty scad:lambda=0,a=3.7");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const Eigen::VectorXd ols = x.colPivHouseholderQr().solve(y);
  const auto coef = j["coefficients"].get<std::vector<double>>();
  REQUIRE(coef.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(coef[static_cast<std::size_t>(k)] == doctest::Approx(ols[k]).epsilon(1e-8));
  CHECK(j["support"] == nlohmann::json({1, 2, 3}));
  CHECK(j["names"] == nlohmann::json({"x1", "x2", "x3"}));
  CHECK(j["converged"] == true);
}

TEST_CASE("fit writes to a file and supports every method") {
  const fs::path data = toy_csv();
  const fs::path out = scratch() / "fit.json";
  for (const char* m : {"one-step", "k-step", "full-lla", "lqa", "plqa"}) {
    fs::remove(out);
    const Run r = run("fit --data " + data.string() + " --response y --intercept --method " + m +
                      " --penalty scad:lambda=0.3 --out " + out.string());
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["schema"] == "sparsefit/1");
    CHECK(j["intercept"].is_number());
  }
  const Run cv = run("fit --data " + data.string() + " --response y --cv --grid-size 10 --seed 3");
  CHECK(cv.code == 0);
  CHECK(nlohmann::json::parse(cv.out)["lambda"].get<double>() > 0.0);
}

TEST_CASE("subset on a strong single predictor") {
  const fs::path file = scratch() / "single.csv";
  std::mt19937_64 g(1);
  std::normal_distribution<double> normal;
  {
    std::ofstream out(file);
    out.precision(17);
    out << "x,y\n";
    for (int i = 0; i < 60; ++i) {
      const double xi = normal(g);
      out << xi << "," << 2.0 * xi + normal(g) << "\n";
    }
  }
  const Run r = run("fit --data " + file.string() + " --response y --method subset --criterion bic");
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["support"] == nlohmann::json({1}));
}

TEST_CASE("error exit codes") {
  const fs::path data = toy_csv();
  CHECK(run("fit --data " + data.string() + " --response nope").code == 3);
  CHECK(run("fit --data /nonexistent.csv --response y").code == 3);
  CHECK(run("fit --data " + data.string() + " --response y --bogus").code == 2);
  CHECK(run("fit --data " + data.string() + " --response y --penalty ridge:lambda=1").code == 2);
  CHECK(run("fit --data " + data.string() + " --response y --lambda 1 --cv").code == 2);
  CHECK(run("fit --response y").code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("threshold curve") {
  const Run r = run("threshold --penalty scad:lambda=2,a=3.7 --mode one-step --zmin -10 --zmax 10 --step 0.01");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "z,theta");
  bool saw8 = false;
  while (std::getline(in, line)) {
    if (line.rfind("8,", 0) == 0) {
      CHECK(line == "8,8");
      saw8 = true;
    }
  }
  CHECK(saw8);
  CHECK(r.out.find("# discontinuities,0") != std::string::npos);
}

TEST_CASE("path and cv") {
  const fs::path data = toy_csv();
  const Run p = run("path --data " + data.string() + " --response y --penalty scad --grid-size 15");
  REQUIRE(p.code == 0);
  std::istringstream in(p.out);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "lambda,x1,x2,x3");
  CHECK(first.substr(first.find(',')) == ",0,0,0");
  int rows = 1;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 15);

  const Run cv = run("cv --data " + data.string() + " --response y --penalty scad --grid 0.25");
  REQUIRE(cv.code == 0);
  CHECK(cv.out.find("# lambda_star,0.25") != std::string::npos);
  CHECK(run("cv --data " + data.string() + " --response y --method subset").code == 2);
}

TEST_CASE("simulate is reproducible across thread counts") {
  const std::string cfg = std::string(SPARSEFIT_EXAMPLES) + "/ex1_n50.tomlike";
  const fs::path a = scratch() / "a.json", b = scratch() / "b.json", c = scratch() / "c.json";
  const Run r1 = run("--threads 1 simulate --config " + cfg + " --reps 10 --seed 1 --out " + a.string());
  const Run r2 = run("--threads 1 simulate --config " + cfg + " --reps 10 --seed 1 --out " + b.string());
  const Run r3 = run("--threads 4 simulate --config " + cfg + " --reps 10 --seed 1 --out " + c.string());
  REQUIRE(r1.code == 0);
  CHECK(r1.out.find("Correct-fit") != std::string::npos);
  CHECK(r1.out == r2.out);
  CHECK(r1.out == r3.out);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) == slurp(c));
  CHECK(nlohmann::json::parse(slurp(a))["scenario"]["replications"] == 10);
  CHECK(run("simulate --config " + cfg + " --scenario missing").code == 2);
}
