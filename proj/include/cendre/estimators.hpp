#pragma once

// Online estimators for censored and adaptively censored regression, plus the
// batch and randomized baselines they are compared against.
//
// Second-order methods keep P_n, the inverse of the accumulated (weighted)
// information including the initial prior. The conventional step matrix is
// C_n = n P_n; every recursion below is written in terms of P so that it is
// defined from the very first datum.
//
// Multiply accounting counts scalar multiplies (and divisions) in the update
// path only. Per step, with p = dim(theta):
//   innovation x'theta                      p
//   LMS-type correction                     p + 1
//   RLS-type correction (Px, x'Px, gain,
//     rank-one update, theta update)        2p^2 + 3p
//   robust clipped RLS correction           p^2 + 3p
//   second-order SA-MLE correction          2p^2 + 4p + 1

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cendre/censor.hpp"
#include "cendre/likelihood.hpp"
#include "cendre/numkit.hpp"

namespace cendre {

struct StepSize {
  enum class Kind { constant, diminishing };
  Kind kind = Kind::constant;
  double mu = 0.1;
  /// Diminishing steps are mu / (n + offset).
  double offset = 0.0;

  static StepSize constant(double mu) { return {Kind::constant, mu, 0.0}; }
  static StepSize diminishing(double mu, double offset = 0.0) {
    return {Kind::diminishing, mu, offset};
  }
  /// Step for the n-th datum (1-based).
  double at(std::uint64_t n) const;
};

struct EstimatorState {
  RealVector theta;
  /// Inverse information P_n; empty for first-order methods.
  SymMatrix P;
  std::uint64_t n = 0;
  StepSize step;
  double sigma = 1.0;
  std::uint64_t multiplies = 0;
  std::uint64_t kept = 0;

  int dim() const { return static_cast<int>(theta.size()); }
  bool second_order() const { return P.size() > 0; }
  /// C_n = n P_n (equal to P_0 before the first datum).
  SymMatrix step_matrix() const;
};

struct PreliminaryFit {
  RealVector theta_K;
  SymMatrix gram_inv;
  int K = 0;
};

namespace estimators {

/// Least-squares fit on the first K rows; also returns (X_K'X_K)^{-1}.
PreliminaryFit preliminary_fit(const Matrix& X_K, const RealVector& y_K);

EstimatorState init_first_order(RealVector theta0, StepSize step, double sigma);
/// theta_0 = theta_K, P_0 = sigma^2 (X_K'X_K)^{-1}.
EstimatorState init_samle2(const PreliminaryFit& fit, double sigma);
/// theta_0 = 0, P_0 = I / eps, the ridge-regularized RLS start.
EstimatorState init_rls(int p, double eps, double sigma);
/// Scale-aware ridge weight 1e-2 * ||x||^2 / p from the first regressor.
double default_rls_epsilon(const RealVector& x_first);

/// First-order SA-MLE. `anchor` is the censoring prediction (x' theta_K);
/// it is ignored for kept data.
void samle1_step(EstimatorState& s, const CensorDecision& d, const RealVector& x, double tau,
                 double anchor);
/// Second-order SA-MLE; P is updated with the information scalar on every
/// datum, censored or not.
void samle2_step(EstimatorState& s, const CensorDecision& d, const RealVector& x, double tau,
                 double anchor);

void lms_step(EstimatorState& s, double y, const RealVector& x);
void rls_step(EstimatorState& s, double y, const RealVector& x);
CensorDecision aclms_step(EstimatorState& s, double y, const RealVector& x, double tau);
CensorDecision acrls_step(EstimatorState& s, double y, const RealVector& x, double tau);
CensorDecision raclms_step(EstimatorState& s, double y, const RealVector& x, double tau,
                           double tau_o);
CensorDecision racrls_step(EstimatorState& s, double y, const RealVector& x, double tau,
                           double tau_o);

/// Randomized Kaczmarz with rows drawn proportionally to their squared norm.
/// `observer`, when set, sees the iterate after every draw.
RealVector kaczmarz_run(const Matrix& X, const RealVector& y, std::uint64_t iters,
                        std::uint64_t seed,
                        const std::function<void(std::uint64_t, const RealVector&)>& observer = {});
/// Row-selection probabilities used by kaczmarz_run.
RealVector kaczmarz_probabilities(const Matrix& X);

/// Normal-equations least squares via Cholesky.
RealVector batch_lse(const Matrix& X, const RealVector& y);

/// sum_n loss_n(traj[n]) - loss_n(theta_ref).
double regret(const std::vector<RealVector>& traj, const std::vector<CensoredTerm>& terms,
              const RealVector& theta_ref);

nlohmann::json snapshot(const EstimatorState& s);
EstimatorState restore(const nlohmann::json& doc);

}  // namespace estimators
}  // namespace cendre
