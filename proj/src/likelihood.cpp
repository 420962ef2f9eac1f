#include "cendre/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "cendre/errors.hpp"

namespace cendre::likelihood {

namespace {

constexpr double kTailSwitch = 6.0;

// Moments for 0 <= z_l < z_u, where both endpoints sit in the upper tail.
IntervalMoments upper_moments(double z_l, double z_u) {
  IntervalMoments m;
  m.log_prob = numkit::interval_log_prob(z_l, z_u);
  if (z_l > kTailSwitch) {
    // Divide numerator and denominator by phi(z_l).
    const double r = std::isfinite(z_u) ? std::exp(-0.5 * (z_u - z_l) * (z_u + z_l)) : 0.0;
    const double denom = numkit::mills_ratio(z_l) - (r > 0.0 ? numkit::mills_ratio(z_u) * r : 0.0);
    const double zr = r > 0.0 ? z_u * r : 0.0;
    m.beta = (1.0 - r) / denom;
    m.info = m.beta * m.beta + (zr - z_l) / denom;
    return m;
  }
  const double prob = std::exp(m.log_prob);
  const double phi_l = numkit::gauss_pdf(z_l);
  const double phi_u = std::isfinite(z_u) ? numkit::gauss_pdf(z_u) : 0.0;
  const double zphi_u = std::isfinite(z_u) ? z_u * phi_u : 0.0;
  m.beta = (phi_l - phi_u) / prob;
  m.info = m.beta * m.beta + (zphi_u - z_l * phi_l) / prob;
  return m;
}

}  // namespace

IntervalMoments interval_moments(double z_l, double z_u) {
  if (!(z_l < z_u)) throw DomainError("interval_moments: requires z_l < z_u");
  if (z_l >= 0.0) return upper_moments(z_l, z_u);
  if (z_u <= 0.0) {
    // Mirror: beta flips sign, info and probability are unchanged.
    IntervalMoments m = upper_moments(-z_u, -z_l);
    m.beta = -m.beta;
    return m;
  }
  IntervalMoments m;
  m.log_prob = numkit::interval_log_prob(z_l, z_u);
  const double prob = std::exp(m.log_prob);
  const double phi_l = numkit::gauss_pdf(z_l);
  const double phi_u = numkit::gauss_pdf(z_u);
  m.beta = (phi_l - phi_u) / prob;
  m.info = m.beta * m.beta + (z_u * phi_u - z_l * phi_l) / prob;
  return m;
}

ScoreInfo evaluate_at(bool censored, double y_or_anchor, double prediction, double tau,
                      double sigma) {
  ScoreInfo s;
  if (!censored) {
    const double e = y_or_anchor - prediction;
    s.loss = e * e / (2.0 * sigma * sigma);
    s.beta = e / (sigma * sigma);
    s.info = 1.0 / (sigma * sigma);
    return s;
  }
  if (!(tau > 0.0)) {
    throw DomainError("censored term needs a positive threshold");
  }
  const double shift = (prediction - y_or_anchor) / sigma;
  const IntervalMoments m = interval_moments(-tau - shift, tau - shift);
  s.loss = -m.log_prob;
  s.beta = m.beta / sigma;
  // Rounding can push the tail expression a hair outside [0, 1].
  s.info = std::clamp(m.info, 0.0, 1.0) / (sigma * sigma);
  return s;
}

std::pair<double, double> interval_bounds(const CensoredTerm& term, const RealVector& theta) {
  if (!term.censored) throw UsageError("interval_bounds: term is not censored");
  const double shift = (term.x.dot(theta) - term.y_or_anchor) / term.sigma;
  return {-term.tau - shift, term.tau - shift};
}

ScoreInfo evaluate(const CensoredTerm& term, const RealVector& theta) {
  if (!(term.sigma > 0.0)) throw DomainError("censored term: sigma must be positive");
  return evaluate_at(term.censored, term.y_or_anchor, term.x.dot(theta), term.tau, term.sigma);
}

double loss(const CensoredTerm& term, const RealVector& theta) {
  return evaluate(term, theta).loss;
}

double score_scalar(const CensoredTerm& term, const RealVector& theta) {
  return evaluate(term, theta).beta;
}

double info_scalar(const CensoredTerm& term, const RealVector& theta) {
  return evaluate(term, theta).info;
}

}  // namespace cendre::likelihood
