#pragma once

// Numerical primitives shared by every other module: standard Gaussian
// functions, interval probabilities in log space, symmetric rank-one inverse
// updates, Cholesky solves and the fast Walsh-Hadamard transform.

#include <span>

#include <Eigen/Dense>

namespace cendre {

using RealVector = Eigen::VectorXd;
using SymMatrix = Eigen::MatrixXd;
using Matrix = Eigen::MatrixXd;

namespace numkit {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal density.
double gauss_pdf(double t);

/// Upper tail Q(t) = P(N(0,1) > t).
double gauss_q(double t);

/// Mills ratio Q(t) / phi(t). Uses a continued fraction for t > 6 so it stays
/// finite where both factors underflow.
double mills_ratio(double t);

/// Inverse of gauss_q on (0, 1). Throws DomainError outside the open interval.
double gauss_q_inv(double u);

/// log(Q(z_l) - Q(z_u)) for z_l < z_u, i.e. the log-probability that a
/// standard normal falls in [z_l, z_u]. Accurate in both tails.
double interval_log_prob(double z_l, double z_u);

/// (C^{-1} + w x x^T)^{-1} via Sherman-Morrison, never forming an inverse.
/// Throws SingularityError when |1 + w x^T C x| < 1e-12.
SymMatrix rank_one_inverse_update(const SymMatrix& C, const RealVector& x, double w);

/// In-place variant of rank_one_inverse_update. Returns the updated matrix
/// applied to x, i.e. C_new x = C x / (1 + w x^T C x), which is the gain
/// vector recursive estimators need next.
RealVector rank_one_inverse_update_in_place(SymMatrix& C, const RealVector& x, double w);

/// Unnormalized Sylvester-Hadamard transform in O(n log n) additions.
/// Throws DomainError unless v.size() is a power of two.
void fwht_in_place(std::span<double> v);
RealVector fwht(RealVector v);

/// Solve A x = b for symmetric positive definite A.
/// Throws SingularityError on a non-positive pivot.
RealVector cholesky_solve(const SymMatrix& A, const RealVector& b);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

}  // namespace numkit
}  // namespace cendre
