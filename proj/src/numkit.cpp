#include "cendre/numkit.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cendre/errors.hpp"

namespace cendre::numkit {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kTailSwitch = 6.0;

// Acklam's rational approximation to the standard normal quantile; relative
// error below 1.2e-9, refined by Newton steps in gauss_q_inv.
double acklam_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// log P(z_l <= Z <= z_u) for 0 <= z_l < z_u.
double upper_tail_interval_log_prob(double z_l, double z_u) {
  if (z_l > kTailSwitch) {
    // P = phi(z_l) * (R(z_l) - R(z_u) * phi(z_u) / phi(z_l))
    double tail = 0.0;
    if (std::isfinite(z_u)) {
      const double ratio = std::exp(-0.5 * (z_u - z_l) * (z_u + z_l));
      tail = mills_ratio(z_u) * ratio;
    }
    return std::log(kInvSqrt2Pi) - 0.5 * z_l * z_l + std::log(mills_ratio(z_l) - tail);
  }
  const double q_l = gauss_q(z_l);
  const double q_u = gauss_q(z_u);
  return std::log(q_l) + std::log1p(-q_u / q_l);
}

}  // namespace

double gauss_pdf(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

double gauss_q(double t) { return 0.5 * std::erfc(t / kSqrt2); }

double mills_ratio(double t) {
  if (t <= kTailSwitch) {
    return gauss_q(t) / gauss_pdf(t);
  }
  if (std::isinf(t)) {
    return 0.0;
  }
  // R(t) = 1/(t + 1/(t + 2/(t + 3/(t + ...)))), modified Lentz.
  constexpr double tiny = 1e-300;
  double f = tiny;
  double c = f;
  double d = 0.0;
  for (int j = 1; j < 500; ++j) {
    const double a = (j == 1) ? 1.0 : static_cast<double>(j - 1);
    d = t + a * d;
    if (d == 0.0) d = tiny;
    d = 1.0 / d;
    c = t + a / c;
    if (c == 0.0) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return f;
}

double gauss_q_inv(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("gauss_q_inv: argument must lie in (0, 1), got " + std::to_string(u));
  }
  double t = -acklam_quantile(u);
  for (int i = 0; i < 2; ++i) {
    const double step = (gauss_q(t) - u) / gauss_pdf(t);
    const double next = t + step;
    if (!std::isfinite(next)) break;
    t = next;
  }
  if (std::isfinite(t) && std::abs(gauss_q(t) - u) <= 1e-12) {
    return t;
  }
  // Bisection fallback; Q is strictly decreasing.
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gauss_q(mid) > u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double interval_log_prob(double z_l, double z_u) {
  if (!(z_l < z_u)) {
    throw DomainError("interval_log_prob: requires z_l < z_u");
  }
  if (z_l >= 0.0) {
    return upper_tail_interval_log_prob(z_l, z_u);
  }
  if (z_u <= 0.0) {
    return upper_tail_interval_log_prob(-z_u, -z_l);
  }
  // Interval straddles zero: P = 1 - Q(z_u) - Q(-z_l).
  return std::log1p(-(gauss_q(z_u) + gauss_q(-z_l)));
}

SymMatrix rank_one_inverse_update(const SymMatrix& C, const RealVector& x, double w) {
  SymMatrix out = C;
  rank_one_inverse_update_in_place(out, x, w);
  return out;
}

RealVector rank_one_inverse_update_in_place(SymMatrix& C, const RealVector& x, double w) {
  // Only the lower triangle is updated and then mirrored, so C stays exactly
  // symmetric however many updates are chained.
  RealVector k = C.selfadjointView<Eigen::Lower>() * x;
  const double denom = 1.0 + w * x.dot(k);
  if (!(std::abs(denom) >= 1e-12)) {
    throw SingularityError("rank-one inverse update: denominator 1 + w x'Cx vanished");
  }
  if (w != 0.0) {
    C.selfadjointView<Eigen::Lower>().rankUpdate(k, -w / denom);
    C.triangularView<Eigen::StrictlyUpper>() = C.transpose();
  }
  k /= denom;
  return k;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

void fwht_in_place(std::span<double> v) {
  const std::size_t n = v.size();
  if (!is_power_of_two(n)) {
    throw DomainError("fwht: length " + std::to_string(n) + " is not a power of two");
  }
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

RealVector fwht(RealVector v) {
  fwht_in_place(std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
  return v;
}

RealVector cholesky_solve(const SymMatrix& A, const RealVector& b) {
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw DomainError("cholesky_solve: dimension mismatch");
  }
  Eigen::LLT<SymMatrix> llt(A);
  if (llt.info() != Eigen::Success) {
    throw SingularityError("cholesky_solve: matrix is not positive definite");
  }
  // A pivot ratio below 1e-7 means a condition number above ~1e14: treat it
  // as rank deficient rather than return noise.
  const auto diag = llt.matrixLLT().diagonal();
  if (diag.minCoeff() <= 1e-7 * diag.maxCoeff()) {
    throw SingularityError("cholesky_solve: matrix is numerically singular");
  }
  return llt.solve(b);
}

}  // namespace cendre::numkit
