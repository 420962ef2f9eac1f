#include "cendre/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cendre/errors.hpp"
#include "cendre/estimators.hpp"
#include "cendre/rng.hpp"

namespace cendre {

void StreamSpec::validate() const {
  if (p < 1) throw ConfigError("p", "must be at least 1");
  if (D < 1) throw ConfigError("D", "must be at least 1");
  if (theta && theta->size() != p) throw ConfigError("theta", "length differs from p");
  if (sigma_x.size() > 0 && (sigma_x.rows() != p || sigma_x.cols() != p)) {
    throw ConfigError("cov", "must be p x p");
  }
  if (design == Design::student_t && !(df >= 1.0)) throw ConfigError("df", "must be >= 1");
  if (!(sigma >= 0.0)) throw ConfigError("sigma", "must be non-negative");
  if (!(outlier_prob >= 0.0 && outlier_prob <= 1.0)) {
    throw ConfigError("outliers.prob", "must lie in [0, 1]");
  }
  if (!(outlier_var >= 0.0)) throw ConfigError("outliers.variance", "must be non-negative");
}

namespace datagen {

SymMatrix toeplitz_cov(int p, double a, double r) {
  if (p < 1) throw DomainError("toeplitz_cov: p must be positive");
  if (!(a > 0.0)) throw DomainError("toeplitz_cov: a must be positive");
  if (!(std::abs(r) < 1.0)) throw DomainError("toeplitz_cov: |r| must be below 1");
  SymMatrix S(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) S(i, j) = a * std::pow(r, std::abs(i - j));
  return S;
}

StreamGenerator::StreamGenerator(StreamSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int p = spec_.p;
  if (spec_.theta) {
    theta_ = *spec_.theta;
  } else {
    Rng rng(derive_seed(spec_.seed, 0));
    theta_.resize(p);
    for (int i = 0; i < p; ++i) theta_[i] = rng.normal();
  }
  if (spec_.sigma_x.size() == 0) {
    chol_ = Matrix::Identity(p, p);
  } else {
    Eigen::LLT<SymMatrix> llt(spec_.sigma_x);
    if (llt.info() != Eigen::Success) throw ConfigError("cov", "not positive definite");
    chol_ = llt.matrixL();
  }
}

std::optional<SymMatrix> StreamGenerator::design_covariance() const {
  SymMatrix shape = chol_ * chol_.transpose();
  if (spec_.design == StreamSpec::Design::gaussian) return shape;
  if (spec_.df <= 2.0) return std::nullopt;
  return SymMatrix(shape * (spec_.df / (spec_.df - 2.0)));
}

StreamSample StreamGenerator::at(std::uint64_t n) const {
  Rng rng(derive_seed(spec_.seed, n + 1));
  const int p = spec_.p;
  RealVector z(p);
  for (int i = 0; i < p; ++i) z[i] = rng.normal();
  StreamSample s;
  s.x = chol_.triangularView<Eigen::Lower>() * z;
  if (spec_.design == StreamSpec::Design::student_t) {
    s.x *= std::sqrt(spec_.df / rng.chi_square(spec_.df));
  }
  double v = spec_.sigma * rng.normal();
  if (spec_.noise_clip > 0.0) v = std::clamp(v, -spec_.noise_clip, spec_.noise_clip);
  s.y = s.x.dot(theta_) + v;
  if (spec_.outlier_prob > 0.0) {
    s.outlier = rng.bernoulli(spec_.outlier_prob);
    const double o = std::sqrt(spec_.outlier_var) * rng.normal();
    if (s.outlier) s.y += o;
  }
  return s;
}

void materialize(const StreamGenerator& gen, std::uint64_t first, std::uint64_t count, Matrix& X,
                 RealVector& y) {
  X.resize(static_cast<Eigen::Index>(count), gen.spec().p);
  y.resize(static_cast<Eigen::Index>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    StreamSample s = gen.at(first + i);
    X.row(static_cast<Eigen::Index>(i)) = s.x.transpose();
    y[static_cast<Eigen::Index>(i)] = s.y;
  }
}

double full_lse_mse(const StreamSpec& spec, int R) {
  if (R < 1) throw DomainError("full_lse_mse: R must be at least 1");
  const StreamGenerator base(spec);
  double total = 0.0;
  for (int r = 0; r < R; ++r) {
    StreamSpec fresh = spec;
    fresh.theta = base.theta();
    fresh.seed = derive_seed(spec.seed, 0x100000000ULL + static_cast<std::uint64_t>(r));
    const StreamGenerator gen(fresh);
    Matrix X;
    RealVector y;
    materialize(gen, 0, spec.D, X, y);
    total += (estimators::batch_lse(X, y) - base.theta()).squaredNorm();
  }
  return total / R;
}

}  // namespace datagen
}  // namespace cendre
