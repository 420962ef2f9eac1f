#pragma once

// Randomized row-reduction baselines for batch least squares.

#include <cstdint>
#include <vector>

#include "cendre/numkit.hpp"

namespace cendre {

struct ReducedProblem {
  Matrix rows;
  RealVector rhs;
  /// Sampled row indices into the (padded, for SRHT) problem, ascending.
  std::vector<std::uint64_t> selected_indices;
  /// Multiplier applied to every sampled row.
  double scale = 1.0;
};

namespace sketch {

/// Zero-pad to the next power of two D', flip signs, apply H / sqrt(D') per
/// column, then keep d rows uniformly without replacement scaled by sqrt(D'/d).
ReducedProblem srht_reduce(const Matrix& X, const RealVector& y, std::uint64_t d,
                           std::uint64_t seed);

/// Plain uniform sampling of d rows without replacement, no preconditioning.
ReducedProblem uniform_reduce(const Matrix& X, const RealVector& y, std::uint64_t d,
                              std::uint64_t seed);

RealVector solve_reduced(const ReducedProblem& rp);

/// d distinct indices from [0, n), sorted; partial Fisher-Yates.
std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t d,
                                                      std::uint64_t seed);

/// Hadamard-preconditioned copy of [X y]: rows padded to D', each column
/// replaced by H diag(s) col / sqrt(D'). Exposed for leverage diagnostics.
Matrix srht_precondition(const Matrix& Xy, std::uint64_t seed);

}  // namespace sketch
}  // namespace cendre
