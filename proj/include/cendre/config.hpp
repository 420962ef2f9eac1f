#pragma once

// Experiment configuration: a versioned JSON document. Parsing is strict;
// unknown keys and ill-typed values raise ConfigError naming the field.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cendre/datagen.hpp"
#include "cendre/estimators.hpp"
#include "cendre/ingest.hpp"

namespace cendre {

inline constexpr const char* kConfigSchema = "cendre.experiment/1";

enum class Method {
  lms,
  rls,
  aclms,
  acrls,
  raclms,
  racrls,
  samle1,
  samle2,
  kaczmarz,
  srht,
  uniform,
  batch_lse,
};

std::string to_string(Method m);
Method parse_method(const std::string& name);
/// Methods that consume a preliminary fit on the first K samples.
bool uses_preliminary_fit(Method m);
/// Methods censoring against their own iterate.
bool adaptive_censoring(Method m);
bool robust(Method m);

struct ThresholdSpec {
  /// constant | nac-exact | nac-clt | ac-online | ac-offline | ac-schedule
  std::string kind = "constant";
  double tau = 0.0;
  double target = 0.0;
  std::vector<double> schedule;
};

struct StepSpec {
  std::string kind = "constant";  // constant | diminishing
  double mu = 0.01;
  double offset = 0.0;

  StepSize build() const;
};

struct CsvSource {
  std::string path;
  std::string target;
  CsvOptions options;
  bool unbiased_sigma = false;
  /// Permute rows per replicate; off means every replicate sees file order.
  bool shuffle = false;
};

struct ExperimentConfig {
  std::string schema = kConfigSchema;
  bool synthetic = true;
  StreamSpec stream;
  /// Human-readable covariance description, echoed into summaries.
  std::string cov = "identity";
  CsvSource csv;

  std::vector<Method> methods;
  ThresholdSpec threshold;
  /// Outlier multiplier kappa_o for robust rules: tau_o,n = prefactor_n kappa_o.
  double tau_o = std::numeric_limits<double>::infinity();
  StepSpec step;
  std::optional<double> eps;
  int K = 0;
  /// Kept fraction d/D for the sampling baselines.
  double ratio = 1.0;
  int replicates = 1;
  std::string record = "geometric";
  std::uint64_t seed = 0;
  int threads = 1;
  int passes = 1;
  /// Free-form notes (e.g. flagged modelling assumptions), echoed verbatim.
  std::vector<std::string> notes;

  void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// "identity", "toeplitz:a,r" or "diag:v".
SymMatrix parse_cov(const std::string& text, int p);

}  // namespace cendre
