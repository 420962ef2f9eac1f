#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "cendre/rng.hpp"

using cendre::derive_seed;
using cendre::Rng;

TEST_CASE("same seed, same stream; counter restarts reproduce") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42);
  for (int i = 0; i < 10; ++i) c.next_u64();
  Rng d(42, 10);
  CHECK(c.next_u64() == d.next_u64());
}

TEST_CASE("derived substreams differ") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(7, s));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("uniform moments and range") {
  Rng r(1);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sq += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sq / n - 1.0 / 3) < 0.005);
}

TEST_CASE("below is unbiased over a small range (chi-square)") {
  Rng r(2);
  const int k = 7, n = 70000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) counts[r.below(k)]++;
  double chi2 = 0;
  for (int c : counts) chi2 += std::pow(c - n / double(k), 2) / (n / double(k));
  CHECK(chi2 < 22.46);  // 0.999 quantile, 6 dof
}

TEST_CASE("normal moments") {
  Rng r(3);
  const int n = 200000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  CHECK(std::abs(m1 / n) < 0.01);
  CHECK(std::abs(m2 / n - 1.0) < 0.015);
  CHECK(std::abs(m4 / n - 3.0) < 0.08);
}

TEST_CASE("gamma and chi-square means") {
  for (double shape : {0.5, 1.5, 4.0}) {
    Rng r(4);
    double s = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) s += r.gamma(shape);
    CHECK(std::abs(s / n - shape) < 0.03 * std::max(1.0, shape));
  }
  Rng r(5);
  double s = 0;
  for (int i = 0; i < 100000; ++i) s += r.chi_square(3.0);
  CHECK(std::abs(s / 100000 - 3.0) < 0.05);
}

TEST_CASE("bernoulli and rademacher") {
  Rng r(6);
  int ones = 0, plus = 0;
  for (int i = 0; i < 100000; ++i) {
    ones += r.bernoulli(0.05);
    const double s = r.rademacher();
    CHECK(std::abs(s) == 1.0);
    plus += s > 0;
  }
  CHECK(std::abs(ones / 1e5 - 0.05) < 0.003);
  CHECK(std::abs(plus / 1e5 - 0.5) < 0.006);
}
