#include "cendre/ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include "cendre/errors.hpp"
#include "cendre/estimators.hpp"

namespace cendre::ingest {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool all_digits(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  nlohmann::json log = nlohmann::json::array();
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, opts.delimiter);
    if (opts.header && !have_header) {
      for (auto f : fields) names.emplace_back(f);
      have_header = true;
      continue;
    }
    if (names.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) names.push_back("c" + std::to_string(i));
    }
    if (fields.size() != names.size()) {
      const std::string msg = "line " + std::to_string(line_no) + ": expected " +
                              std::to_string(names.size()) + " fields, found " +
                              std::to_string(fields.size());
      if (!opts.skip_malformed) throw IoError(path + ": " + msg);
      log.push_back({{"action", "skip_row"}, {"reason", msg}});
      continue;
    }
    cells.emplace_back(fields.begin(), fields.end());
    line_numbers.push_back(line_no);
  }
  if (names.empty()) throw ConfigError("csv", path + " has no columns");

  std::size_t target_col = names.size();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == target) target_col = i;
  }
  if (target_col == names.size() && all_digits(target)) {
    const auto idx = std::stoull(target);
    if (idx < names.size()) target_col = idx;
  }
  if (target_col == names.size()) throw ConfigError("target", "column '" + target + "' not found");

  std::vector<bool> keep_col(names.size(), true);
  if (opts.drop_non_numeric) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      for (const auto& row : cells) {
        if (!parse_real(row[c])) {
          if (c == target_col) {
            throw ConfigError("target", "column '" + names[c] + "' is not numeric");
          }
          keep_col[c] = false;
          log.push_back({{"action", "drop_column"}, {"column", names[c]}});
          break;
        }
      }
    }
  }

  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c != target_col && keep_col[c]) feature_cols.push_back(c);
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> response;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::vector<double> vals;
    std::optional<std::string> bad;
    for (std::size_t c : feature_cols) {
      auto v = parse_real(cells[r][c]);
      if (!v) {
        bad = names[c];
        break;
      }
      vals.push_back(*v);
    }
    auto yv = parse_real(cells[r][target_col]);
    if (!bad && !yv) bad = names[target_col];
    if (bad) {
      const std::string msg =
          "line " + std::to_string(line_numbers[r]) + ": non-numeric value in column '" + *bad + "'";
      if (!opts.skip_malformed) throw IoError(path + ": " + msg);
      log.push_back({{"action", "skip_row"}, {"reason", msg}});
      continue;
    }
    rows.push_back(std::move(vals));
    response.push_back(*yv);
  }

  Dataset ds;
  ds.target_name = names[target_col];
  for (std::size_t c : feature_cols) ds.column_names.push_back(names[c]);
  const auto D = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(feature_cols.size());
  ds.design.resize(D, p + (opts.add_intercept ? 1 : 0));
  ds.response.resize(D);
  for (Eigen::Index i = 0; i < D; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) ds.design(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    ds.response[i] = response[static_cast<std::size_t>(i)];
  }

  if (opts.standardize && D > 0) {
    nlohmann::json stats = nlohmann::json::array();
    for (Eigen::Index j = 0; j < p; ++j) {
      const double mean = ds.design.col(j).mean();
      const double sd = std::sqrt((ds.design.col(j).array() - mean).square().mean());
      ds.design.col(j).array() -= mean;
      if (sd > 0.0) ds.design.col(j) /= sd;
      stats.push_back({{"column", ds.column_names[static_cast<std::size_t>(j)]}, {"mean", mean}, {"sd", sd}});
    }
    log.push_back({{"action", "standardize"}, {"columns", stats}});
  }
  if (opts.add_intercept) {
    ds.design.col(p).setOnes();
    ds.column_names.emplace_back("(intercept)");
    log.push_back({{"action", "add_intercept"}});
  }
  if (ds.design.rows() <= ds.design.cols()) {
    throw ConfigError("csv", path + ": need more rows than features after cleaning");
  }

  std::string delim(1, opts.delimiter);
  ds.provenance = {{"source", path},
                   {"target", ds.target_name},
                   {"rows", ds.design.rows()},
                   {"features", ds.design.cols()},
                   {"options",
                    {{"header", opts.header},
                     {"delimiter", delim},
                     {"drop_non_numeric", opts.drop_non_numeric},
                     {"add_intercept", opts.add_intercept},
                     {"skip_malformed", opts.skip_malformed},
                     {"standardize", opts.standardize}}},
                   {"log", log}};
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path, char delimiter) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& n : ds.column_names) out << n << delimiter;
  out << (ds.target_name.empty() ? "y" : ds.target_name) << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < ds.design.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.design.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.design(i, j));
      out << buf << delimiter;
    }
    std::snprintf(buf, sizeof buf, "%.17g", ds.response[i]);
    out << buf << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

SurrogateTruth surrogate_truth(const Dataset& ds, bool unbiased) {
  SurrogateTruth t;
  t.theta = estimators::batch_lse(ds.design, ds.response);
  const double rss = (ds.response - ds.design * t.theta).squaredNorm();
  const double denom = static_cast<double>(ds.design.rows()) -
                       (unbiased ? static_cast<double>(ds.design.cols()) : 0.0);
  t.sigma = std::sqrt(rss / denom);
  return t;
}

void write_provenance(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << ds.provenance.dump(2) << '\n';
}

}  // namespace cendre::ingest
