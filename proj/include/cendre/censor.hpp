#pragma once

// Censoring rules and threshold design.
//
// A datum is kept when its normalized innovation |y - prediction| / sigma
// reaches the threshold; ties at the boundary are kept. Thresholds are chosen
// so that a target fraction pi* of the stream is censored.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cendre/numkit.hpp"

namespace cendre {

struct CensorDecision {
  bool kept = true;
  /// The observed value when kept; empty when censored. For robust_decide this
  /// is the innovation the rule was applied to.
  std::optional<double> value;
  /// Set only by the robust rule, and only on kept data.
  bool outlier = false;

  bool censored() const { return !kept; }
};

namespace censor {

/// Non-adaptive rule against a fixed prediction y_hat.
CensorDecision nac_decide(double y, double y_hat, double sigma, double tau);

/// Adaptive rule against the current iterate theta.
CensorDecision ac_decide(double y, const RealVector& x, const RealVector& theta, double sigma,
                         double tau);

/// Three-way rule: censored below tau*sigma, nominal up to tau_o*sigma,
/// outlier at or above it.
CensorDecision robust_decide(double e, double sigma, double tau, double tau_o);

/// Censoring probability of a datum with leverage x' G x, G = (X_K'X_K)^{-1}.
double censor_prob_exact(double tau, const RealVector& x, const SymMatrix& gram_inv);
double nac_threshold_exact(const RealVector& x, const SymMatrix& gram_inv, double pi_star);

/// Large-p approximation where x' G x is replaced by p / K.
double censor_prob_clt(double tau, int p, int K);
double nac_threshold_clt(int p, int K, double pi_star);

/// Exact per-step threshold for AC-RLS given the step matrix C_{n-1}.
double ac_threshold_online(const RealVector& x, const SymMatrix& C, std::uint64_t n,
                           double pi_star);
/// Data-independent threshold for a constant target; n >= 2.
double ac_threshold_offline(int p, std::uint64_t n, double pi_star);
/// Thresholds for a per-datum target schedule; entry 0 is tau_1 = 0.
std::vector<double> ac_threshold_schedule(int p, const std::vector<double>& pi_schedule);

/// sqrt(leverage + 1) * Q^{-1}((1 - pi*) / 2).
double threshold_from_leverage(double leverage, double pi_star);

}  // namespace censor

/// What a plan may look at when choosing tau_n.
struct ThresholdQuery {
  std::uint64_t n = 1;                     // 1-based index of the datum
  const RealVector* x = nullptr;           // regressor of datum n
  const SymMatrix* step_matrix = nullptr;  // inverse information after n-1 data
  std::uint64_t kept = 0;                  // data absorbed so far
};

class ThresholdPlan {
 public:
  enum class Kind { constant, nac_exact, nac_clt, ac_online, ac_offline, ac_schedule };

  static ThresholdPlan constant(double tau);
  static ThresholdPlan nac_exact(double pi_star, SymMatrix gram_inv);
  static ThresholdPlan nac_clt(double pi_star, int p, int K);
  /// Until p data have been kept the online plan keeps unconditionally; the
  /// leverage term is meaningless while the step matrix still carries the
  /// initial prior.
  static ThresholdPlan ac_online(double pi_star, int p);
  static ThresholdPlan ac_offline(double pi_star, int p);
  static ThresholdPlan ac_schedule(std::vector<double> pi_schedule, int p);

  double threshold(const ThresholdQuery& q) const;
  /// Ratio of the innovation scale to sigma implied by the plan (1 for a
  /// constant threshold). Robust rules scale their outlier threshold by it.
  double prefactor(const ThresholdQuery& q) const;

  Kind kind() const { return kind_; }
  bool adaptive() const;
  bool needs_step_matrix() const { return kind_ == Kind::ac_online; }
  /// Target censoring probability; empty for constant and schedule plans.
  std::optional<double> target() const;
  std::string name() const;

 private:
  ThresholdPlan() = default;

  Kind kind_ = Kind::constant;
  double tau_ = 0.0;
  double pi_star_ = 0.0;
  double quantile_ = 0.0;
  int p_ = 0;
  int K_ = 0;
  SymMatrix gram_inv_;
  std::vector<double> schedule_;
  std::vector<double> schedule_tau_;
};

std::string to_string(ThresholdPlan::Kind kind);

}  // namespace cendre
