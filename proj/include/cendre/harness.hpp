#pragma once

// Monte Carlo runner: data source -> censor -> estimator, with per-step
// metrics recorded on a sparse schedule and aggregated across replicates.
//
// Replicate r runs on substream derive_seed(cfg.seed, r) and every method in
// the config sees the same replicate data, so method comparisons are paired.
// Aggregation is a fixed-order reduction, so the output does not depend on
// the number of threads.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cendre/config.hpp"

namespace cendre {

struct TracePoint {
  std::uint64_t n = 0;
  double mse = 0.0;
  double rse = 0.0;
  double censor_ratio = 0.0;
  std::uint64_t multiplies = 0;
};

struct TrialTrace {
  Method method = Method::lms;
  std::uint64_t seed = 0;
  std::vector<TracePoint> points;
  RealVector theta;
  RealVector theta_o;
  std::uint64_t processed = 0;
  std::uint64_t kept = 0;
};

struct CurvePoint {
  std::uint64_t n = 0;
  double mean_mse = 0.0;
  double std_mse = 0.0;
  double mean_rse = 0.0;
  double std_rse = 0.0;
  double mean_censor_ratio = 0.0;
  double mean_multiplies = 0.0;
};

struct Curve {
  Method method = Method::lms;
  std::vector<CurvePoint> points;
  int replicates = 0;
};

struct MonteCarloResult {
  ExperimentConfig cfg;
  /// Sorted by (method name, seed, n).
  std::vector<TrialTrace> traces;
  /// One per configured method, in config order.
  std::vector<Curve> curves;

  const Curve& curve(Method m) const;
};

/// Bound constants for a synthetic source with known design covariance.
struct TheoryBounds {
  double tau = 0.0;
  double sigma = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  double L2 = 0.0;
  double trace_rinv = 0.0;

  /// Diminishing-step AC-LMS MSE bound (mu = 2/alpha) at step n.
  double aclms_mse_diminishing(std::uint64_t n, double init_err2) const;
  /// Constant-step AC-LMS MSE bound; meaningful for mu < alpha / (16 L^2).
  double aclms_mse_constant(std::uint64_t n, double mu, double init_err2) const;
  double acrls_mse_lower(std::uint64_t n) const;
  double acrls_mse_upper(std::uint64_t n) const;
};

/// Shared, immutable per-experiment data (a loaded CSV and its surrogate
/// truth). Synthetic configs need none.
struct ExperimentContext {
  std::shared_ptr<const Dataset> dataset;
  SurrogateTruth truth;
};

namespace harness {

ExperimentContext prepare(const ExperimentConfig& cfg);

/// Recording schedule over steps 1..N.
std::vector<std::uint64_t> record_points(const std::string& record, std::uint64_t N);

TrialTrace run_trial(const ExperimentConfig& cfg, Method method, std::uint64_t replicate_seed,
                     const ExperimentContext& ctx = {});

MonteCarloResult monte_carlo(const ExperimentConfig& cfg);

TheoryBounds theory_bounds(const ExperimentConfig& cfg);

/// Step size and regret bound of the first-order SA-MLE regret guarantee.
double regret_step(std::uint64_t D, double dist, double x_bar, double beta_bar);
double regret_bound(std::uint64_t D, double dist, double x_bar, double beta_bar);

struct SweepPoint {
  std::string value;
  MonteCarloResult result;
};

/// axis is "tau", "ratio" or "method".
std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const std::string& axis,
                              const std::vector<std::string>& values);

struct BenchRow {
  Method method = Method::lms;
  double seconds = 0.0;
  std::uint64_t multiplies = 0;
  std::uint64_t kept = 0;
  std::uint64_t processed = 0;
};
std::vector<BenchRow> bench(const ExperimentConfig& cfg, int repeats = 3);

void write_results_csv(const std::string& path, const std::vector<SweepPoint>& points,
                       const std::string& axis = "");
void write_results_csv(const std::string& path, const MonteCarloResult& result);
void write_curves_csv(const std::string& path, const std::vector<SweepPoint>& points,
                      const std::string& axis = "");
void write_curves_csv(const std::string& path, const MonteCarloResult& result);
nlohmann::json summary(const MonteCarloResult& result);

}  // namespace harness
}  // namespace cendre
