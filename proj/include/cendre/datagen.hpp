#pragma once

// Seeded synthetic streams y_n = x_n' theta_o + v_n (+ o_n).
//
// Sample n is a pure function of (seed, n): it draws from its own substream,
// so a stream can be consumed lazily, restarted at any index, or split across
// threads without changing a single bit.

#include <cstdint>
#include <optional>

#include "cendre/numkit.hpp"

namespace cendre {

struct StreamSpec {
  enum class Design { gaussian, student_t };

  int p = 10;
  std::uint64_t D = 1000;
  /// Explicit truth; when empty, entries are i.i.d. N(0,1) from the seed.
  std::optional<RealVector> theta;
  Design design = Design::gaussian;
  /// Covariance (Gaussian) or shape matrix (multivariate t); identity if empty.
  SymMatrix sigma_x;
  double df = 3.0;
  double sigma = 1.0;
  /// Noise is clipped to [-clip, clip] when clip > 0.
  double noise_clip = 0.0;
  double outlier_prob = 0.0;
  double outlier_var = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct StreamSample {
  double y = 0.0;
  RealVector x;
  bool outlier = false;
};

namespace datagen {

/// Sigma_ij = a r^|i-j|.
SymMatrix toeplitz_cov(int p, double a, double r);

class StreamGenerator {
 public:
  explicit StreamGenerator(StreamSpec spec);

  const RealVector& theta() const { return theta_; }
  const StreamSpec& spec() const { return spec_; }
  /// Covariance of x_n, or nullopt when it does not exist (t with df <= 2).
  std::optional<SymMatrix> design_covariance() const;

  /// Sample with 0-based index n.
  StreamSample at(std::uint64_t n) const;
  /// Next sample in order; cheap, constant storage.
  StreamSample next() { return at(cursor_++); }
  std::uint64_t position() const { return cursor_; }
  void seek(std::uint64_t n) { cursor_ = n; }

 private:
  StreamSpec spec_;
  RealVector theta_;
  Matrix chol_;
  std::uint64_t cursor_ = 0;
};

/// Rows [first, first + count) of the stream as a dense problem.
void materialize(const StreamGenerator& gen, std::uint64_t first, std::uint64_t count, Matrix& X,
                 RealVector& y);

/// Monte Carlo mean of ||theta_LSE - theta_o||^2 over R fresh D-sample
/// instances sharing the same theta_o.
double full_lse_mse(const StreamSpec& spec, int R);

}  // namespace datagen
}  // namespace cendre
