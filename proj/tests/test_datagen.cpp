#include <doctest.h>

#include <cmath>

#include "cendre/datagen.hpp"
#include "cendre/errors.hpp"
#include "oracles.hpp"

using namespace cendre;
using namespace cendre::datagen;

TEST_CASE("toeplitz_cov") {
  SymMatrix two(2, 2);
  two << 2, 1, 1, 2;
  CHECK(toeplitz_cov(2, 2.0, 0.5) == two);
  CHECK(toeplitz_cov(4, 3.0, 0.0) == 3.0 * SymMatrix::Identity(4, 4));
  CHECK_THROWS_AS(toeplitz_cov(3, 1.0, 1.0), DomainError);
  // Eigenvalues of a r^|i-j| lie in (a(1-r)/(1+r), a(1+r)/(1-r)).
  Eigen::SelfAdjointEigenSolver<SymMatrix> es(toeplitz_cov(300, 2.0, 0.5));
  CHECK(es.eigenvalues().minCoeff() > 2.0 / 3.0);
  CHECK(es.eigenvalues().maxCoeff() < 6.0);
  CHECK(es.eigenvalues().minCoeff() < 2.0 / 3.0 * 1.01);
}

TEST_CASE("noiseless streams are exact") {
  StreamSpec s;
  s.p = 7;
  s.D = 100;
  s.sigma = 0.0;
  s.seed = 3;
  StreamGenerator g(s);
  for (std::uint64_t n = 0; n < 100; ++n) {
    const auto smp = g.at(n);
    CHECK(smp.y == smp.x.dot(g.theta()));
  }
}

TEST_CASE("explicit theta is honoured and streams are pure in (seed, n)") {
  StreamSpec s;
  s.p = 3;
  s.theta = RealVector::Ones(3);
  s.seed = 9;
  StreamGenerator a(s), b(s);
  CHECK(a.theta() == RealVector::Ones(3));
  a.seek(40);
  CHECK(a.next().y == b.at(40).y);
  CHECK(a.position() == 41);
  s.seed = 10;
  StreamGenerator c(s);
  CHECK(c.at(0).y != b.at(0).y);
}

TEST_CASE("sample covariance matches the design") {
  StreamSpec s;
  s.p = 30;
  s.D = 50000;
  s.sigma_x = toeplitz_cov(30, 2.0, 0.5);
  s.seed = 1;
  StreamGenerator g(s);
  Matrix X;
  RealVector y;
  materialize(g, 0, s.D, X, y);
  const Matrix S = X.transpose() * X / static_cast<double>(s.D);
  CHECK(oracle::rel_err(S, s.sigma_x) < 0.05);
  CHECK(g.design_covariance().has_value());
}

TEST_CASE("outlier frequency") {
  StreamSpec s;
  s.p = 2;
  s.D = 40000;
  s.outlier_prob = 0.05;
  s.outlier_var = 225.0;
  s.seed = 5;
  StreamGenerator g(s);
  int hits = 0;
  for (std::uint64_t n = 0; n < s.D; ++n) hits += g.at(n).outlier;
  CHECK(std::abs(hits / 40000.0 - 0.05) < 0.005);
}

TEST_CASE("noise clipping") {
  StreamSpec s;
  s.p = 2;
  s.sigma = 1.0;
  s.noise_clip = 0.5;
  s.seed = 2;
  StreamGenerator g(s);
  for (std::uint64_t n = 0; n < 2000; ++n) {
    const auto smp = g.at(n);
    CHECK(std::abs(smp.y - smp.x.dot(g.theta())) <= 0.5 + 1e-12);
  }
}

TEST_CASE("multivariate t design is heavy tailed") {
  StreamSpec s;
  s.p = 3;
  s.design = StreamSpec::Design::student_t;
  s.df = 3.0;
  s.seed = 6;
  StreamGenerator g(s);
  double m2 = 0.0, m4 = 0.0;
  const int N = 200000;
  for (int n = 0; n < N; ++n) {
    const double v = g.at(static_cast<std::uint64_t>(n)).x[0];
    m2 += v * v / N;
    m4 += v * v * v * v / N;
  }
  // Gaussian kurtosis is 3; a t3 marginal has infinite kurtosis.
  CHECK(m4 / (m2 * m2) > 6.0);
  // Covariance of t with df = 3 is 3 times the shape matrix.
  CHECK(m2 == doctest::Approx(3.0).epsilon(0.15));
  CHECK(g.design_covariance()->isApprox(3.0 * SymMatrix::Identity(3, 3)));
  s.df = 2.0;
  CHECK_FALSE(StreamGenerator(s).design_covariance().has_value());
}

TEST_CASE("full-data LSE error") {
  StreamSpec s;
  s.p = 5;
  s.D = 200;
  s.sigma = 0.0;
  s.seed = 1;
  CHECK(full_lse_mse(s, 3) < 1e-20);

  // Gaussian design, identity covariance: E||err||^2 = sigma^2 p / (D - p - 1).
  s.sigma = 1.5;
  const double expect = 2.25 * 5 / (200.0 - 5 - 1);
  CHECK(full_lse_mse(s, 400) == doctest::Approx(expect).epsilon(0.1));
  s.D = 800;
  const double expect4 = 2.25 * 5 / (800.0 - 5 - 1);
  CHECK(full_lse_mse(s, 400) == doctest::Approx(expect4).epsilon(0.1));
}

TEST_CASE("stream settings validation names fields") {
  StreamSpec s;
  s.p = 0;
  try {
    s.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "p");
  }
  s.p = 2;
  s.outlier_prob = 2.0;
  try {
    s.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "outliers.prob");
  }
}
