#pragma once

// CSV datasets for real-data experiments and the full-data surrogate truth.

#include <string>
#include <vector>

#include <json.hpp>

#include "cendre/numkit.hpp"

namespace cendre {

struct Dataset {
  Matrix design;
  RealVector response;
  /// Feature names in design-column order (an added intercept is "(intercept)").
  std::vector<std::string> column_names;
  std::string target_name;
  /// Source path and an ordered log of every preprocessing action.
  nlohmann::json provenance;

  std::size_t rows() const { return static_cast<std::size_t>(design.rows()); }
  int dim() const { return static_cast<int>(design.cols()); }
};

struct CsvOptions {
  bool header = true;
  char delimiter = ',';
  /// Drop any column holding a non-numeric cell instead of failing.
  bool drop_non_numeric = false;
  bool add_intercept = false;
  /// Skip (and log) malformed rows instead of failing on the first one.
  bool skip_malformed = false;
  /// Center and scale feature columns to unit population variance.
  bool standardize = false;
};

struct SurrogateTruth {
  RealVector theta;
  double sigma = 0.0;
};

namespace ingest {

/// `target` is a header name, or a 0-based column index when given as digits.
/// Without a header, columns are named c0, c1, ...
Dataset load_csv(const std::string& path, const std::string& target, const CsvOptions& opts = {});

/// Features then target, full round-trip precision.
void write_csv(const Dataset& ds, const std::string& path, char delimiter = ',');

/// Full-data LSE and the residual noise scale. The default divides the
/// residual sum of squares by D; `unbiased` divides by D - p.
SurrogateTruth surrogate_truth(const Dataset& ds, bool unbiased = false);

void write_provenance(const Dataset& ds, const std::string& path);

}  // namespace ingest
}  // namespace cendre
