#include "cendre/censor.hpp"

#include <cmath>
#include <string>

#include "cendre/errors.hpp"

namespace cendre {
namespace censor {

namespace {

void check_rule_inputs(double y, double pred, double sigma, double tau) {
  if (!std::isfinite(y) || !std::isfinite(pred) || !std::isfinite(sigma) || !std::isfinite(tau)) {
    throw DomainError("censoring rule: non-finite input");
  }
  if (!(sigma > 0.0)) throw DomainError("censoring rule: sigma must be positive");
  if (!(tau >= 0.0)) throw DomainError("censoring rule: tau must be non-negative");
}

void check_target(double pi_star) {
  if (!(pi_star >= 0.0 && pi_star < 1.0)) {
    throw DomainError("target censoring probability must lie in [0, 1), got " +
                      std::to_string(pi_star));
  }
}

double quantile_for(double pi_star) {
  check_target(pi_star);
  if (pi_star == 0.0) return 0.0;
  return numkit::gauss_q_inv(0.5 * (1.0 - pi_star));
}

CensorDecision decide(double y, double pred, double sigma, double tau) {
  check_rule_inputs(y, pred, sigma, tau);
  CensorDecision d;
  d.kept = std::abs(y - pred) / sigma >= tau;
  if (d.kept) d.value = y;
  return d;
}

}  // namespace

CensorDecision nac_decide(double y, double y_hat, double sigma, double tau) {
  return decide(y, y_hat, sigma, tau);
}

CensorDecision ac_decide(double y, const RealVector& x, const RealVector& theta, double sigma,
                         double tau) {
  if (x.size() != theta.size()) throw DomainError("ac_decide: dimension mismatch");
  return decide(y, x.dot(theta), sigma, tau);
}

CensorDecision robust_decide(double e, double sigma, double tau, double tau_o) {
  check_rule_inputs(e, 0.0, sigma, tau);
  if (!(tau < tau_o)) throw DomainError("robust_decide: requires tau < tau_o");
  const double a = std::abs(e);
  CensorDecision d;
  if (a < tau * sigma) {
    d.kept = false;
    return d;
  }
  d.kept = true;
  d.value = e;
  d.outlier = a >= tau_o * sigma;
  return d;
}

double threshold_from_leverage(double leverage, double pi_star) {
  return std::sqrt(leverage + 1.0) * quantile_for(pi_star);
}

double censor_prob_exact(double tau, const RealVector& x, const SymMatrix& gram_inv) {
  if (!(tau >= 0.0)) throw DomainError("censor_prob_exact: tau must be non-negative");
  const double lev = x.dot(gram_inv * x);
  return 1.0 - 2.0 * numkit::gauss_q(tau / std::sqrt(lev + 1.0));
}

double nac_threshold_exact(const RealVector& x, const SymMatrix& gram_inv, double pi_star) {
  check_target(pi_star);
  return threshold_from_leverage(x.dot(gram_inv * x), pi_star);
}

double censor_prob_clt(double tau, int p, int K) {
  if (!(tau >= 0.0)) throw DomainError("censor_prob_clt: tau must be non-negative");
  if (p < 1 || K < 1) throw DomainError("censor_prob_clt: p and K must be positive");
  return 1.0 - 2.0 * numkit::gauss_q(tau / std::sqrt(static_cast<double>(p) / K + 1.0));
}

double nac_threshold_clt(int p, int K, double pi_star) {
  if (p < 1 || K < 1) throw DomainError("nac_threshold_clt: p and K must be positive");
  return std::sqrt(1.0 + static_cast<double>(p) / K) * quantile_for(pi_star);
}

double ac_threshold_online(const RealVector& x, const SymMatrix& C, std::uint64_t n,
                           double pi_star) {
  if (n < 1) throw DomainError("ac_threshold_online: n must be >= 1");
  return threshold_from_leverage(x.dot(C * x) / static_cast<double>(n), pi_star);
}

double ac_threshold_offline(int p, std::uint64_t n, double pi_star) {
  if (n < 2) throw DomainError("ac_threshold_offline: n must be >= 2");
  check_target(pi_star);
  const double lev = static_cast<double>(p) / (static_cast<double>(n - 1) * (1.0 - pi_star));
  return threshold_from_leverage(lev, pi_star);
}

std::vector<double> ac_threshold_schedule(int p, const std::vector<double>& pi_schedule) {
  std::vector<double> tau(pi_schedule.size(), 0.0);
  double kept_mass = 0.0;
  for (std::size_t i = 0; i < pi_schedule.size(); ++i) {
    check_target(pi_schedule[i]);
    if (i > 0) {
      if (!(kept_mass > 0.0)) {
        throw DomainError("ac_threshold_schedule: empty kept mass before datum " +
                          std::to_string(i + 1));
      }
      tau[i] = threshold_from_leverage(p / kept_mass, pi_schedule[i]);
    }
    kept_mass += 1.0 - pi_schedule[i];
  }
  return tau;
}

}  // namespace censor

ThresholdPlan ThresholdPlan::constant(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("constant threshold must be >= 0");
  ThresholdPlan plan;
  plan.kind_ = Kind::constant;
  plan.tau_ = tau;
  return plan;
}

ThresholdPlan ThresholdPlan::nac_exact(double pi_star, SymMatrix gram_inv) {
  ThresholdPlan plan;
  plan.kind_ = Kind::nac_exact;
  plan.pi_star_ = pi_star;
  plan.quantile_ = censor::threshold_from_leverage(0.0, pi_star);
  plan.gram_inv_ = std::move(gram_inv);
  return plan;
}

ThresholdPlan ThresholdPlan::nac_clt(double pi_star, int p, int K) {
  ThresholdPlan plan;
  plan.kind_ = Kind::nac_clt;
  plan.pi_star_ = pi_star;
  plan.p_ = p;
  plan.K_ = K;
  plan.quantile_ = censor::threshold_from_leverage(0.0, pi_star);
  plan.tau_ = censor::nac_threshold_clt(p, K, pi_star);
  return plan;
}

ThresholdPlan ThresholdPlan::ac_online(double pi_star, int p) {
  ThresholdPlan plan;
  plan.kind_ = Kind::ac_online;
  plan.pi_star_ = pi_star;
  plan.p_ = p;
  plan.quantile_ = censor::threshold_from_leverage(0.0, pi_star);
  return plan;
}

ThresholdPlan ThresholdPlan::ac_offline(double pi_star, int p) {
  if (p < 1) throw DomainError("ac_offline plan: p must be positive");
  ThresholdPlan plan;
  plan.kind_ = Kind::ac_offline;
  plan.pi_star_ = pi_star;
  plan.p_ = p;
  plan.quantile_ = censor::threshold_from_leverage(0.0, pi_star);
  return plan;
}

ThresholdPlan ThresholdPlan::ac_schedule(std::vector<double> pi_schedule, int p) {
  ThresholdPlan plan;
  plan.kind_ = Kind::ac_schedule;
  plan.p_ = p;
  plan.schedule_tau_ = censor::ac_threshold_schedule(p, pi_schedule);
  plan.schedule_ = std::move(pi_schedule);
  return plan;
}

bool ThresholdPlan::adaptive() const {
  return kind_ == Kind::ac_online || kind_ == Kind::ac_offline || kind_ == Kind::ac_schedule;
}

std::optional<double> ThresholdPlan::target() const {
  if (kind_ == Kind::constant || kind_ == Kind::ac_schedule) return std::nullopt;
  return pi_star_;
}

double ThresholdPlan::prefactor(const ThresholdQuery& q) const {
  switch (kind_) {
    case Kind::constant:
      return 1.0;
    case Kind::nac_exact:
      return std::sqrt(q.x->dot(gram_inv_ * *q.x) + 1.0);
    case Kind::nac_clt:
      return std::sqrt(1.0 + static_cast<double>(p_) / K_);
    case Kind::ac_online:
      if (q.kept < static_cast<std::uint64_t>(p_) || q.step_matrix == nullptr) return 1.0;
      return std::sqrt(q.x->dot(*q.step_matrix * *q.x) + 1.0);
    case Kind::ac_offline:
      if (q.n < 2) return 1.0;
      return std::sqrt(static_cast<double>(p_) /
                           (static_cast<double>(q.n - 1) * (1.0 - pi_star_)) +
                       1.0);
    case Kind::ac_schedule: {
      if (q.n < 2) return 1.0;
      const std::size_t i = q.n - 1;
      const double quant = censor::threshold_from_leverage(0.0, schedule_.at(i));
      return quant > 0.0 ? schedule_tau_.at(i) / quant : 1.0;
    }
  }
  return 1.0;
}

double ThresholdPlan::threshold(const ThresholdQuery& q) const {
  switch (kind_) {
    case Kind::constant:
    case Kind::nac_clt:
      return tau_;
    case Kind::nac_exact:
      if (q.x == nullptr) throw UsageError("nac-exact plan needs the regressor");
      return prefactor(q) * quantile_;
    case Kind::ac_online:
      if (q.x == nullptr) throw UsageError("ac-online plan needs the regressor");
      if (q.kept < static_cast<std::uint64_t>(p_)) return 0.0;
      if (q.step_matrix == nullptr) throw UsageError("ac-online plan needs the step matrix");
      return prefactor(q) * quantile_;
    case Kind::ac_offline:
      if (q.n < 2) return 0.0;
      return censor::ac_threshold_offline(p_, q.n, pi_star_);
    case Kind::ac_schedule:
      if (q.n < 1 || q.n > schedule_tau_.size()) {
        throw DomainError("ac-schedule plan: datum " + std::to_string(q.n) +
                          " is past the end of the schedule");
      }
      return schedule_tau_[q.n - 1];
  }
  return 0.0;
}

std::string to_string(ThresholdPlan::Kind kind) {
  switch (kind) {
    case ThresholdPlan::Kind::constant: return "constant";
    case ThresholdPlan::Kind::nac_exact: return "nac-exact";
    case ThresholdPlan::Kind::nac_clt: return "nac-clt";
    case ThresholdPlan::Kind::ac_online: return "ac-online";
    case ThresholdPlan::Kind::ac_offline: return "ac-offline";
    case ThresholdPlan::Kind::ac_schedule: return "ac-schedule";
  }
  return "unknown";
}

std::string ThresholdPlan::name() const { return to_string(kind_); }

}  // namespace cendre
