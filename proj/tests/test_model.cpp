#include <doctest.h>

#include <sstream>

#include "collab/error.hpp"
#include "collab/model.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace collab;

TEST_CASE("validate accepts and rejects the documented cases") {
  const auto m = validate({0, 0, 1, 1, 0.5});
  CHECK(m.rho() == 0.5);
  CHECK(m.cov_xy() == doctest::Approx(0.5));

  CHECK(code_of([] { validate({0, 0, -1, 1, 0}); }) == ErrorCode::NonPositiveVariance);
  CHECK(code_of([] { validate({0, 0, 1, 0, 0}); }) == ErrorCode::NonPositiveVariance);
  CHECK(code_of([] { validate({0, 0, 1, 1, 1.0}); }) == ErrorCode::CorrelationOutOfRange);
  CHECK(code_of([] { validate({0, 0, 1, 1, -1.0}); }) == ErrorCode::CorrelationOutOfRange);
  CHECK(code_of([] { validate({0, 0, 1, 1, 1.0 - 1e-10}); }) == ErrorCode::CorrelationOutOfRange);
  CHECK_NOTHROW(validate({0, 0, 1, 1, kMaxAbsRho}));
}

TEST_CASE("validate is idempotent and never clamps") {
  Rng rng(11);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  std::uniform_real_distribution<double> v(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const ModelParams p{u(rng) * 5, u(rng) * 5, v(rng), v(rng), u(rng)};
    const auto once = validate(p);
    const auto twice = validate(once.params());
    CHECK(once.params().rho == p.rho);
    CHECK(twice.params().var_x == once.params().var_x);
    CHECK(twice.params().mu_y == once.params().mu_y);
  }
}

TEST_CASE("Observation factories keep kind and coordinates consistent") {
  CHECK(Observation::marginal_x(0, 1.0).consistent());
  CHECK(Observation::marginal_y(1, 1.0).consistent());
  CHECK(Observation::joint(2, 1.0, 2.0).consistent());
  CHECK(Observation::idle(3).consistent());
  Observation bad = Observation::marginal_x(0, 1.0);
  bad.y = 2.0;
  CHECK_FALSE(bad.consistent());
}

TEST_CASE("sample_joint moments") {
  constexpr int n = 1'000'000;
  SUBCASE("independent at rho = 0") {
    const auto m = validate({0, 0, 1, 1, 0.0});
    Rng rng(1);
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) std::tie(xs[i], ys[i]) = sample_joint(m, rng);
    CHECK(std::abs(oracle::pearson(xs, ys)) <= 0.005);
  }
  SUBCASE("correlation 0.8") {
    const auto m = validate({0, 0, 1, 1, 0.8});
    Rng rng(2);
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) std::tie(xs[i], ys[i]) = sample_joint(m, rng);
    CHECK(std::abs(oracle::pearson(xs, ys) - 0.8) <= 0.005);
  }
  SUBCASE("means") {
    const auto m = validate({3, -2, 1, 1, 0.3});
    Rng rng(3);
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) std::tie(xs[i], ys[i]) = sample_joint(m, rng);
    CHECK(std::abs(oracle::mean(xs) - 3.0) <= 0.01);
    CHECK(std::abs(oracle::mean(ys) + 2.0) <= 0.01);
  }
}

TEST_CASE("sample_joint covariance converges within 3 standard errors") {
  constexpr int n = 1'000'000;
  Rng gen(99);
  for (int trial = 0; trial < 3; ++trial) {
    const double vx = 0.5 + trial, vy = 2.0 - 0.5 * trial, rho = -0.6 + 0.6 * trial;
    const auto m = validate({1.0, -1.0, vx, vy, rho});
    Rng rng(gen());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    std::vector<std::pair<double, double>> draws(n);
    for (auto& d : draws) {
      d = sample_joint(m, rng);
      sx += d.first;
      sy += d.second;
    }
    const double mx = sx / n, my = sy / n;
    for (auto [x, y] : draws) {
      sxx += (x - mx) * (x - mx);
      syy += (y - my) * (y - my);
      sxy += (x - mx) * (y - my);
    }
    const double cxx = sxx / (n - 1), cyy = syy / (n - 1), cxy = sxy / (n - 1);
    const double sxy_true = rho * std::sqrt(vx * vy);
    // Gaussian sampling variances of second moments.
    CHECK(std::abs(cxx - vx) <= 3 * std::sqrt(2.0 * vx * vx / n));
    CHECK(std::abs(cyy - vy) <= 3 * std::sqrt(2.0 * vy * vy / n));
    CHECK(std::abs(cxy - sxy_true) <= 3 * std::sqrt((vx * vy + sxy_true * sxy_true) / n));
  }
}

TEST_CASE("sample_marginal moments and determinism") {
  constexpr int n = 1'000'000;
  {
    const auto m = validate({0, 0, 1, 1, 0});
    Rng rng(4);
    std::vector<double> ys(n);
    for (auto& y : ys) y = sample_marginal(m, Axis::Y, rng);
    CHECK(std::abs(oracle::mean(ys)) <= 0.01);
  }
  {
    const auto m = validate({5, 0, 4, 1, 0});
    Rng rng(5);
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample_marginal(m, Axis::X, rng);
    CHECK(std::abs(oracle::variance(xs) - 4.0) <= 0.05);
    CHECK(std::abs(oracle::mean(xs) - 5.0) <= 0.01);
  }
  {
    const auto m = validate({0, 0, 1, 1, 0.4});
    Rng a(123), b(123);
    for (int i = 0; i < 1000; ++i) {
      REQUIRE(sample_marginal(m, Axis::X, a) == sample_marginal(m, Axis::X, b));
      REQUIRE(sample_joint(m, a) == sample_joint(m, b));
    }
  }
}

TEST_CASE("joint x-coordinate and marginal X share a distribution (KS, alpha = 0.001)") {
  constexpr std::size_t n = 10'000;
  const auto m = validate({2, -1, 3, 0.5, 0.7});
  Rng ra(1001), rb(2002);
  std::vector<double> joint_x(n), marg_x(n);
  for (auto& x : joint_x) x = sample_joint(m, ra).first;
  for (auto& x : marg_x) x = sample_marginal(m, Axis::X, rb);
  CHECK(oracle::ks_statistic(joint_x, marg_x) < oracle::ks_critical(n, n, 0.001));
}

TEST_CASE("derived seeds differ per stream and are stable") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
}

TEST_CASE("MultivariateModel validates covariance") {
  Eigen::MatrixXd s(2, 2);
  s << 2, 0.5, 0.5, 1;
  CHECK_NOTHROW(MultivariateModel(Eigen::VectorXd::Zero(2), s));

  Eigen::MatrixXd asym = s;
  asym(0, 1) += 1e-9;
  CHECK(code_of([&] { MultivariateModel(Eigen::VectorXd::Zero(2), asym); }) == ErrorCode::SingularCovariance);

  Eigen::MatrixXd singular(2, 2);
  singular << 1, 1, 1, 1;
  CHECK(code_of([&] { MultivariateModel(Eigen::VectorXd::Zero(2), singular); }) == ErrorCode::SingularCovariance);

  CHECK(code_of([&] { MultivariateModel(Eigen::VectorXd::Zero(3), s); }) == ErrorCode::SingularCovariance);
}

TEST_CASE("MultivariateModel sampling reproduces the covariance") {
  Eigen::MatrixXd s(3, 3);
  s << 2, 0.3, -0.4, 0.3, 1, 0.2, -0.4, 0.2, 0.5;
  Eigen::VectorXd mu(3);
  mu << 1, 2, 3;
  const MultivariateModel m(mu, s);
  Rng rng(8);
  constexpr int n = 200'000;
  Eigen::MatrixXd draws(n, 3);
  for (int i = 0; i < n; ++i) draws.row(i) = m.sample(rng).transpose();
  const Eigen::VectorXd mean = draws.colwise().mean().transpose();
  const Eigen::MatrixXd centered = draws.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);
  CHECK((mean - mu).cwiseAbs().maxCoeff() < 0.02);
  CHECK((cov - s).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("model config file") {
  std::istringstream in("# model\nmu_x = 1.5\nvar_y=4\nrho = -0.25  # comment\n");
  const ModelParams p = read_model_params(in);
  CHECK(p.mu_x == 1.5);
  CHECK(p.mu_y == 0.0);
  CHECK(p.var_y == 4.0);
  CHECK(p.rho == -0.25);

  std::istringstream unknown("sigma = 1\n");
  CHECK(code_of([&] { read_model_params(unknown); }) == ErrorCode::InvalidConfig);
  std::istringstream malformed("rho = 0.5x\n");
  CHECK(code_of([&] { read_model_params(malformed); }) == ErrorCode::InvalidConfig);
  std::istringstream dup("rho = 0.5\nrho = 0.4\n");
  CHECK(code_of([&] { read_model_params(dup); }) == ErrorCode::InvalidConfig);
}
