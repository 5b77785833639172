#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sparsefit/error.hpp"
#include "sparsefit/sim.hpp"

using namespace sparsefit;

namespace {

sim::ScenarioSpec small_spec(sim::Example e, int n, int reps) {
  sim::ScenarioSpec s;
  s.example = e;
  s.n = n;
  s.beta_true = sim::default_beta(e, s.p);
  s.replications = reps;
  s.test_points = 2000;
  s.grid_size = 20;
  return s;
}

}  // namespace

TEST_CASE("ar covariance") {
  const Eigen::MatrixXd s = sim::ar_covariance(12, 0.5);
  CHECK(s(0, 0) == 1.0);
  CHECK(s(0, 1) == 0.5);
  CHECK(s(0, 2) == 0.25);
  CHECK(s(11, 0) == doctest::Approx(std::pow(0.5, 11)));
  CHECK(s.isApprox(s.transpose()));
}

TEST_CASE("default coefficients") {
  const Eigen::VectorXd b = sim::default_beta(sim::Example::Linear, 12);
  CHECK(b.size() == 12);
  CHECK(b[0] == 3.0);
  CHECK(b[1] == 1.5);
  CHECK(b[4] == 2.0);
  CHECK(b.cwiseAbs().sum() == 6.5);
  CHECK(sim::default_beta(sim::Example::Poisson, 12)[4] == 0.8);
}

TEST_CASE("linear covariates have the AR covariance") {
  auto s = small_spec(sim::Example::Linear, 1000000, 1);
  s.p = 5;
  s.beta_true = Eigen::VectorXd::Zero(5);
  const Dataset d = sim::gen_linear(s, 0);
  const Eigen::MatrixXd& x = d.design();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(x.rows());
  const Eigen::MatrixXd truth = sim::ar_covariance(5, 0.5);
  CHECK((cov - truth).cwiseAbs().maxCoeff() <= 0.01);
  // beta = 0: y is standard normal.
  CHECK(d.response().mean() == doctest::Approx(0.0).epsilon(0.01));
  CHECK(d.response().squaredNorm() / 1e6 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("replications are reproducible on their own") {
  const auto s = small_spec(sim::Example::Linear, 30, 1);
  const Dataset a = sim::gen_linear(s, 7);
  const Dataset b = sim::gen_linear(s, 7);
  const Dataset c = sim::gen_linear(s, 8);
  CHECK(a.design() == b.design());
  CHECK(a.response() == b.response());
  CHECK(a.design() != c.design());
  auto other_seed = s;
  other_seed.seed = 2;
  CHECK(sim::gen_linear(other_seed, 7).design() != a.design());
}

TEST_CASE("logistic covariates") {
  auto s = small_spec(sim::Example::Logistic, 100000, 1);
  s.beta_true = Eigen::VectorXd::Zero(12);
  const Dataset d = sim::gen_logistic(s, 0);
  const Eigen::MatrixXd& x = d.design();
  for (Eigen::Index j = 1; j < 12; j += 2) {
    CHECK((x.col(j).array() * (1.0 - x.col(j).array())).abs().maxCoeff() == 0.0);
    CHECK(x.col(j).mean() == doctest::Approx(0.5).epsilon(0.01));
  }
  // Odd (1-based) coordinates stay continuous.
  CHECK(x.col(0).mean() == doctest::Approx(0.0).epsilon(0.01));
  CHECK(d.response().mean() == doctest::Approx(0.5).epsilon(0.01));
  for (Eigen::Index i = 0; i < 1000; ++i) CHECK((d.response()[i] == 0.0 || d.response()[i] == 1.0));
}

TEST_CASE("poisson responses") {
  auto s = small_spec(sim::Example::Poisson, 100000, 1);
  s.beta_true = Eigen::VectorXd::Zero(12);
  CHECK(sim::gen_poisson(s, 0).response().mean() == doctest::Approx(1.0).epsilon(0.01));

  s.beta_true = sim::default_beta(sim::Example::Poisson, 12);
  const Dataset d = sim::gen_poisson(s, 1);
  const Eigen::VectorXd eta = d.design() * s.beta_true;
  // Bin on the linear predictor and compare the mean count with exp(u).
  const double width = 0.25;
  for (double lo = -1.0; lo < 1.0; lo += width) {
    double sum = 0.0, mu = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      if (eta[i] >= lo && eta[i] < lo + width) {
        sum += d.response()[i];
        mu += std::exp(eta[i]);
        ++count;
      }
    }
    REQUIRE(count > 1000);
    const double se = std::sqrt(mu) / count;
    CHECK(std::abs(sum / count - mu / count) <= 4.0 * se);
  }
}

TEST_CASE("model error") {
  const Eigen::MatrixXd sigma = sim::ar_covariance(12, 0.5);
  const Eigen::VectorXd beta = sim::default_beta(sim::Example::Linear, 12);
  CHECK(sim::model_error_linear(beta, beta, sigma) == 0.0);
  Eigen::VectorXd shifted = beta;
  shifted[0] += 1.0;
  CHECK(sim::model_error_linear(shifted, beta, sigma) == doctest::Approx(1.0));

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(12);
  Eigen::VectorXd e1 = zero;
  e1[0] = 1.0;
  CHECK(sim::model_error_poisson(zero, zero, sigma) == 0.0);
  const double expected = std::exp(2.0) - 2.0 * std::exp(0.5) + 1.0;
  CHECK(sim::model_error_poisson(e1, zero, sigma) == doctest::Approx(expected));
  // Monte Carlo oracle of E (exp(x1) - 1)^2 with x1 standard normal.
  std::mt19937_64 g(5);
  std::normal_distribution<double> normal;
  double mc = 0.0;
  const int draws = 2000000;
  for (int i = 0; i < draws; ++i) {
    const double v = std::exp(normal(g)) - 1.0;
    mc += v * v;
  }
  CHECK(sim::model_error_poisson(e1, zero, sigma) == doctest::Approx(mc / draws).epsilon(0.03));

  Eigen::MatrixXd tx(2, 12);
  tx.setZero();
  tx(0, 0) = 1.0;
  CHECK(sim::model_error_logistic(beta, beta, tx) == 0.0);
  const double d0 = 1.0 / (1.0 + std::exp(-1.0)) - 0.5;
  CHECK(sim::model_error_logistic(e1, zero, tx) == doctest::Approx(d0 * d0 / 2.0));
  CHECK_THROWS_AS(sim::model_error_linear(e1, Eigen::VectorXd::Zero(3), sigma), DimensionMismatch);
}

TEST_CASE("oracle and full rows") {
  for (const auto e : {sim::Example::Linear, sim::Example::Logistic, sim::Example::Poisson}) {
    auto s = small_spec(e, 200, 10);
    s.methods = {"oracle", "full"};
    const auto report = sim::run_scenario(s);
    REQUIRE(report.rows.size() == 2);
    const auto& oracle = report.rows[0];
    CHECK(oracle.mrme == 0.0);
    CHECK(oracle.c_avg == 3.0);
    CHECK(oracle.ic_avg == 0.0);
    CHECK(oracle.correctfit == 1.0);
    CHECK(oracle.support_mse == 0.0);
    const auto& full = report.rows[1];
    CHECK(full.mrme == 1.0);
    CHECK(full.ic_avg == 9.0);
    CHECK(full.overfit == 1.0);
    CHECK(full.valid);
    CHECK(full.replications == 10);
  }
}

TEST_CASE("fit classes partition the replications") {
  auto s = small_spec(sim::Example::Linear, 50, 12);
  s.methods = {"one-step/scad", "subset/bic", "oracle-ols"};
  const auto report = sim::run_scenario(s);
  for (const auto& r : report.rows) {
    CHECK(r.underfit + r.correctfit + r.overfit == doctest::Approx(1.0));
    CHECK(r.c_avg <= 3.0);
    CHECK(r.ic_avg <= 9.0);
  }
  CHECK(report.rows[2].correctfit == 1.0);
  CHECK(report.rows[2].mrme < 1.0);
}

TEST_CASE("reports do not depend on the thread count") {
  auto s = small_spec(sim::Example::Logistic, 100, 6);
  s.methods = {"one-step/scad", "subset/bic", "full"};
  const std::string a = sim::to_json(sim::run_scenario(s, 1));
  const std::string b = sim::to_json(sim::run_scenario(s, 3));
  CHECK(a == b);
  CHECK(sim::to_table(sim::run_scenario(s, 2)) == sim::to_table(sim::run_scenario(s, 1)));
}

TEST_CASE("table and json") {
  auto s = small_spec(sim::Example::Linear, 40, 3);
  s.methods = {"oracle"};
  const auto report = sim::run_scenario(s);
  const std::string table = sim::to_table(report);
  CHECK(table.find("MRME") != std::string::npos);
  CHECK(table.find("Correct-fit") != std::string::npos);
  const std::string json = sim::to_json(report);
  CHECK(json.find("\"schema\": \"sparsefit/1\"") != std::string::npos);
  CHECK(json.find("\"correctfit\": 1.0") != std::string::npos);
}

TEST_CASE("config parsing") {
  std::istringstream in(R"(# shared settings
example = linear
reps = 20
methods = one-step/scad; subset/bic

[small]
n = 50
[big]
n = 100   # override
seed = 9
beta = 1, 0, 2
p = 3
)");
  const auto specs = sim::parse_config(in);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].name == "small");
  CHECK(specs[0].n == 50);
  CHECK(specs[0].replications == 20);
  CHECK(specs[0].methods == std::vector<std::string>{"one-step/scad", "subset/bic"});
  CHECK(specs[0].beta_true.size() == 12);
  CHECK(specs[1].n == 100);
  CHECK(specs[1].seed == 9);
  CHECK(specs[1].beta_true.size() == 3);
  CHECK(specs[1].beta_true[2] == 2.0);

  std::istringstream bad_key("n = 50\ncolour = red\nmethods = oracle\n");
  CHECK_THROWS_AS(sim::parse_config(bad_key), ParseError);
  std::istringstream bad_value("n = fifty\nmethods = oracle\n");
  CHECK_THROWS_AS(sim::parse_config(bad_value), ParseError);
  std::istringstream bad_beta("p = 4\nbeta = 1, 2\nmethods = oracle\n");
  CHECK_THROWS_AS(sim::parse_config(bad_beta), ParseError);
  std::istringstream bad_method("methods = one-step/ridge\n");
  CHECK_THROWS_AS(sim::parse_config(bad_method), ParseError);
}
