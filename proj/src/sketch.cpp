#include "cendre/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cendre/errors.hpp"
#include "cendre/rng.hpp"

namespace cendre::sketch {

namespace {

void validate(const Matrix& X, const RealVector& y, std::uint64_t d, std::uint64_t limit) {
  if (X.rows() != y.size()) throw DomainError("sketch: row count mismatch");
  if (d < static_cast<std::uint64_t>(X.cols())) {
    throw DomainError("sketch: d=" + std::to_string(d) + " is below p=" +
                      std::to_string(X.cols()));
  }
  if (d > limit) {
    throw DomainError("sketch: d=" + std::to_string(d) + " exceeds available rows " +
                      std::to_string(limit));
  }
}

ReducedProblem gather(const Matrix& Xy, std::vector<std::uint64_t> idx, double scale) {
  const Eigen::Index p = Xy.cols() - 1;
  ReducedProblem rp;
  rp.rows.resize(static_cast<Eigen::Index>(idx.size()), p);
  rp.rhs.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(idx[k]);
    rp.rows.row(static_cast<Eigen::Index>(k)) = scale * Xy.row(r).head(p);
    rp.rhs[static_cast<Eigen::Index>(k)] = scale * Xy(r, p);
  }
  rp.selected_indices = std::move(idx);
  rp.scale = scale;
  return rp;
}

}  // namespace

std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t d,
                                                      std::uint64_t seed) {
  if (d > n) throw DomainError("sample_without_replacement: d exceeds n");
  std::vector<std::uint64_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::uint64_t{0});
  Rng rng(seed);
  for (std::uint64_t i = 0; i < d; ++i) {
    const std::uint64_t j = i + rng.below(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(d);
  std::sort(pool.begin(), pool.end());
  return pool;
}

Matrix srht_precondition(const Matrix& Xy, std::uint64_t seed) {
  const auto D = static_cast<std::uint64_t>(Xy.rows());
  const std::uint64_t Dp = numkit::next_power_of_two(D);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(Dp), Xy.cols());
  out.topRows(Xy.rows()) = Xy;
  Rng rng(derive_seed(seed, 0));
  const double inv = 1.0 / std::sqrt(static_cast<double>(Dp));
  for (std::uint64_t i = 0; i < D; ++i) out.row(static_cast<Eigen::Index>(i)) *= rng.rademacher() * inv;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    numkit::fwht_in_place(std::span<double>(out.col(c).data(), static_cast<std::size_t>(Dp)));
  }
  return out;
}

ReducedProblem srht_reduce(const Matrix& X, const RealVector& y, std::uint64_t d,
                           std::uint64_t seed) {
  const std::uint64_t Dp = numkit::next_power_of_two(static_cast<std::uint64_t>(X.rows()));
  validate(X, y, d, Dp);
  Matrix Xy(X.rows(), X.cols() + 1);
  Xy << X, y;
  const Matrix mixed = srht_precondition(Xy, seed);
  auto idx = sample_without_replacement(Dp, d, derive_seed(seed, 1));
  return gather(mixed, std::move(idx), std::sqrt(static_cast<double>(Dp) / static_cast<double>(d)));
}

ReducedProblem uniform_reduce(const Matrix& X, const RealVector& y, std::uint64_t d,
                              std::uint64_t seed) {
  validate(X, y, d, static_cast<std::uint64_t>(X.rows()));
  Matrix Xy(X.rows(), X.cols() + 1);
  Xy << X, y;
  auto idx = sample_without_replacement(static_cast<std::uint64_t>(X.rows()), d, derive_seed(seed, 1));
  return gather(Xy, std::move(idx), 1.0);
}

RealVector solve_reduced(const ReducedProblem& rp) {
  if (rp.rows.rows() < rp.rows.cols()) throw SingularityError("solve_reduced: d < p");
  const SymMatrix gram = rp.rows.transpose() * rp.rows;
  return numkit::cholesky_solve(gram, rp.rows.transpose() * rp.rhs);
}

}  // namespace cendre::sketch
