#include <doctest.h>

#include <cmath>
#include <random>

#include "cendre/errors.hpp"
#include "cendre/likelihood.hpp"
#include "oracles.hpp"

using namespace cendre;
using namespace cendre::likelihood;

namespace {

CensoredTerm term(bool censored, double y, RealVector x, double tau, double sigma) {
  CensoredTerm t;
  t.censored = censored;
  t.y_or_anchor = y;
  t.x = std::move(x);
  t.tau = tau;
  t.sigma = sigma;
  return t;
}

RealVector scalar(double v) {
  RealVector x(1);
  x << v;
  return x;
}

// Variance of a standard normal truncated to [a, b], by quadrature.
double truncated_variance(double a, double b) {
  const long double m0 = oracle::mass(a, b);
  const long double m1 =
      oracle::integrate([](long double t) { return t * oracle::pdf_l(t); }, a, b) / m0;
  const long double m2 =
      oracle::integrate([](long double t) { return t * t * oracle::pdf_l(t); }, a, b) / m0;
  return static_cast<double>(m2 - m1 * m1);
}

}  // namespace

TEST_CASE("interval_bounds") {
  const auto t = term(true, 0.0, scalar(1.0), 1.0, 1.0);
  auto [zl, zu] = interval_bounds(t, scalar(0.0));
  CHECK(zl == -1.0);
  CHECK(zu == 1.0);
  std::tie(zl, zu) = interval_bounds(t, scalar(0.5));
  CHECK(zl == doctest::Approx(-1.5));
  CHECK(zu == doctest::Approx(0.5));
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 100; ++i) {
    const double tau = std::abs(u(gen)) + 0.01, sigma = std::abs(u(gen)) + 0.1;
    const auto ti = term(true, u(gen), oracle::random_vector(3, gen), tau, sigma);
    const auto [a, b] = interval_bounds(ti, oracle::random_vector(3, gen));
    CHECK(b - a == doctest::Approx(2 * tau).epsilon(1e-12));
  }
  CHECK_THROWS_AS(interval_bounds(term(false, 1.0, scalar(1.0), 1.0, 1.0), scalar(0.0)), UsageError);
}

TEST_CASE("loss") {
  CHECK(loss(term(false, 2.0, scalar(1.0), 0.0, 1.0), scalar(2.0)) == 0.0);
  const double centered = loss(term(true, 0.0, scalar(1.0), 1.0, 1.0), scalar(0.0));
  CHECK(centered == doctest::Approx(-std::log(static_cast<double>(oracle::mass(-1, 1)))).epsilon(1e-10));
  CHECK(std::abs(centered - 0.381715) < 1e-5);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 1000; ++i) {
    const auto t = term(true, u(gen), oracle::random_vector(2, gen), std::abs(u(gen)) / 5 + 0.01, 1.0);
    CHECK(loss(t, oracle::random_vector(2, gen)) >= 0.0);
  }
}

TEST_CASE("score_scalar") {
  CHECK(score_scalar(term(false, 2.0, scalar(1.0), 0.0, 1.0), scalar(0.5)) == doctest::Approx(1.5));
  CHECK(score_scalar(term(true, 0.3, scalar(1.0), 1.0, 1.0), scalar(0.3)) == 0.0);
  const double b = score_scalar(term(true, 0.0, scalar(1.0), 1.0, 1.0), scalar(0.5));
  const double ref = (oracle::pdf(-1.5) - oracle::pdf(0.5)) / static_cast<double>(oracle::mass(-1.5, 0.5));
  CHECK(b == doctest::Approx(ref).epsilon(1e-10));
  CHECK(std::abs(b + 0.35628) < 1e-5);
}

TEST_CASE("info_scalar") {
  CHECK(info_scalar(term(false, 1.0, scalar(1.0), 0.0, 2.0), scalar(0.0)) == 0.25);
  const double h = info_scalar(term(true, 0.0, scalar(1.0), 1.0, 1.0), scalar(0.5));
  CHECK(h == doctest::Approx(1.0 - truncated_variance(-1.5, 0.5)).epsilon(1e-9));
  CHECK(std::abs(h - 0.71978) < 1e-4);
}

TEST_CASE("info equals one minus the truncated variance") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int i = 0; i < 200; ++i) {
    double a = u(gen), b = u(gen);
    if (std::abs(a - b) < 1e-3) continue;
    if (a > b) std::swap(a, b);
    const auto m = interval_moments(a, b);
    CHECK(m.info == doctest::Approx(1.0 - truncated_variance(a, b)).epsilon(1e-7));
    CHECK(m.info > 0.0);
    CHECK(m.info < 1.0);
  }
}

TEST_CASE("far-tail intervals stay finite and approach the one-sided limits") {
  for (double z : {8.0, 20.0, 35.0}) {
    const auto m = interval_moments(z, z + 2.0);
    CHECK(std::isfinite(m.beta));
    CHECK(std::isfinite(m.info));
    CHECK(std::isfinite(m.log_prob));
    // For a wide far-tail interval beta -> mills^-1 ~ z and info -> 1 - Var ~ 1.
    CHECK(m.beta == doctest::Approx(z).epsilon(0.05));
    CHECK(m.info > 0.9);
    CHECK(m.info <= 1.0 + 1e-12);
    const auto mirror = interval_moments(-z - 2.0, -z);
    CHECK(mirror.beta == doctest::Approx(-m.beta).epsilon(1e-14));
    CHECK(mirror.info == doctest::Approx(m.info).epsilon(1e-14));
  }
  const auto narrow = interval_moments(30.0, 30.001);
  CHECK(narrow.info >= 0.0);
  CHECK(narrow.info <= 1.0 + 1e-9);
}

TEST_CASE("finite differences of the loss match the score and information") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-3, 3);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < 500; ++i) {
    const int p = 3;
    const double sigma = 0.5 + std::abs(u(gen));
    const auto t = term(coin(gen), u(gen), oracle::random_vector(p, gen), 0.2 + std::abs(u(gen)), sigma);
    const RealVector th = 0.5 * oracle::random_vector(p, gen);
    const auto si = evaluate(t, th);
    const double h = 1e-5;
    for (int j = 0; j < p; ++j) {
      RealVector a = th, b = th;
      a[j] += h;
      b[j] -= h;
      const double fd = (loss(t, a) - loss(t, b)) / (2 * h);
      const double expect = -si.beta * t.x[j];
      CHECK(std::abs(fd - expect) <= 1e-6 * std::max(1.0, std::abs(expect)));
      const double fd2 = -(score_scalar(t, a) * t.x[j] - score_scalar(t, b) * t.x[j]) / (2 * h);
      const double expect2 = si.info * t.x[j] * t.x[j];
      CHECK(std::abs(fd2 - expect2) <= 1e-5 * std::max(1.0, std::abs(expect2)));
    }
    CHECK(si.info > 0.0);
    CHECK(si.info <= 1.0 / (sigma * sigma) * (1 + 1e-12));
  }
}

TEST_CASE("evaluate_at validates the censored inputs") {
  CHECK_THROWS_AS(evaluate_at(true, 0.0, 0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(evaluate(term(true, 0.0, scalar(1.0), 1.0, 0.0), scalar(0.0)), DomainError);
}
