#pragma once

// Per-datum censored Gaussian likelihood.
//
// For an uncensored datum the loss is the usual (y - x'theta)^2 / (2 sigma^2).
// A censored datum only tells us |y - anchor| < tau * sigma, so its loss is
// -log P(z_l <= v/sigma <= z_u) with
//   z_l = -tau - (x'theta - anchor)/sigma,  z_u = tau - (x'theta - anchor)/sigma.
//
// Sign conventions: beta is the *negative* gradient scalar (grad loss =
// -beta x) and info is the positive Hessian scalar (Hess loss = info x x').
// With these, a first-order step theta += mu beta x on an uncensored datum is
// exactly an LMS step with gain mu / sigma^2.

#include <utility>

#include "cendre/numkit.hpp"

namespace cendre {

struct CensoredTerm {
  bool censored = false;
  /// y for an uncensored datum, the censoring anchor (prediction) otherwise.
  double y_or_anchor = 0.0;
  RealVector x;
  double tau = 0.0;
  double sigma = 1.0;
};

struct ScoreInfo {
  double loss = 0.0;
  double beta = 0.0;
  double info = 0.0;
};

namespace likelihood {

std::pair<double, double> interval_bounds(const CensoredTerm& term, const RealVector& theta);

double loss(const CensoredTerm& term, const RealVector& theta);
double score_scalar(const CensoredTerm& term, const RealVector& theta);
double info_scalar(const CensoredTerm& term, const RealVector& theta);
ScoreInfo evaluate(const CensoredTerm& term, const RealVector& theta);

/// Scalar kernels on standardized interval endpoints. `beta` and `info` here
/// are for sigma = 1; divide by sigma and sigma^2 respectively.
struct IntervalMoments {
  double log_prob = 0.0;
  double beta = 0.0;
  double info = 0.0;
};
IntervalMoments interval_moments(double z_l, double z_u);

/// Censored or uncensored evaluation given the precomputed prediction x'theta.
ScoreInfo evaluate_at(bool censored, double y_or_anchor, double prediction, double tau,
                      double sigma);

}  // namespace likelihood
}  // namespace cendre
