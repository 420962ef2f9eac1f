#pragma once

#include <cstdint>
#include <optional>

namespace cendre {

/// Independent substream seed for `stream` under a root `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Counter-based generator: draw i is a pure function of (key, i), so a
/// stream can be re-created at any position and substreams never share
/// state. The variate transforms below are written out here rather than taken
/// from <random> so that sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t counter = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Uniform integer in [0, n), n > 0, without modulo bias.
  std::uint64_t below(std::uint64_t n);
  double normal();
  double gamma(double shape);
  double chi_square(double df);
  bool bernoulli(double p);
  /// +1 or -1 with equal probability.
  double rademacher();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
  std::optional<double> spare_normal_;
};

}  // namespace cendre
