#include "cendre/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "cendre/errors.hpp"

namespace cendre {

namespace {

using nlohmann::json;

struct MethodName {
  Method m;
  const char* name;
};

constexpr MethodName kMethods[] = {
    {Method::lms, "lms"},         {Method::rls, "rls"},
    {Method::aclms, "ac-lms"},    {Method::acrls, "ac-rls"},
    {Method::raclms, "rac-lms"},  {Method::racrls, "rac-rls"},
    {Method::samle1, "samle1"},   {Method::samle2, "samle2"},
    {Method::kaczmarz, "kaczmarz"}, {Method::srht, "srht"},
    {Method::uniform, "uniform"}, {Method::batch_lse, "batch-lse"},
};

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
    }
  }
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    if (!obj.contains(key)) throw ConfigError(path, "missing required field");
    throw ConfigError(path, "has the wrong type");
  }
}

template <class T>
T get_or(const json& obj, const std::string& key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  return get<T>(obj, key, path);
}

char parse_delimiter(const std::string& s) {
  if (s == "\\t" || s == "tab") return '\t';
  if (s.size() != 1) throw ConfigError("source.delimiter", "must be a single character");
  return s[0];
}

void parse_source(const json& src, ExperimentConfig& cfg) {
  if (!src.is_object()) throw ConfigError("source", "must be an object");
  const auto kind = get<std::string>(src, "kind", "source.kind");
  if (kind == "synthetic") {
    reject_unknown(src, "source",
                   {"kind", "p", "D", "design", "df", "cov", "sigma", "noise_clip", "outliers",
                    "theta"});
    cfg.synthetic = true;
    StreamSpec& s = cfg.stream;
    s.p = get<int>(src, "p", "source.p");
    s.D = get<std::uint64_t>(src, "D", "source.D");
    if (s.p < 1) throw ConfigError("source.p", "must be at least 1");
    if (s.D < 1) throw ConfigError("source.D", "must be at least 1");
    const auto design = get_or<std::string>(src, "design", "source.design", "gaussian");
    if (design == "gaussian") {
      s.design = StreamSpec::Design::gaussian;
    } else if (design == "t" || design == "student-t") {
      s.design = StreamSpec::Design::student_t;
    } else {
      throw ConfigError("source.design", "expected 'gaussian' or 't', got '" + design + "'");
    }
    s.df = get_or<double>(src, "df", "source.df", 3.0);
    cfg.cov = get_or<std::string>(src, "cov", "source.cov", "identity");
    try {
      s.sigma_x = parse_cov(cfg.cov, s.p);
    } catch (const DomainError& e) {
      throw ConfigError("source.cov", e.what());
    }
    s.sigma = get_or<double>(src, "sigma", "source.sigma", 1.0);
    s.noise_clip = get_or<double>(src, "noise_clip", "source.noise_clip", 0.0);
    if (src.contains("outliers")) {
      const json& o = src.at("outliers");
      if (!o.is_object()) throw ConfigError("source.outliers", "must be an object");
      reject_unknown(o, "source.outliers", {"prob", "variance"});
      s.outlier_prob = get<double>(o, "prob", "source.outliers.prob");
      s.outlier_var = get<double>(o, "variance", "source.outliers.variance");
    }
    if (src.contains("theta")) {
      const auto v = get<std::vector<double>>(src, "theta", "source.theta");
      s.theta = Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    try {
      s.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("source." + e.field(), e.what());
    }
  } else if (kind == "csv") {
    reject_unknown(src, "source",
                   {"kind", "path", "target", "header", "delimiter", "drop_non_numeric",
                    "add_intercept", "skip_malformed", "standardize", "unbiased_sigma",
                    "shuffle"});
    cfg.synthetic = false;
    CsvSource& c = cfg.csv;
    c.path = get<std::string>(src, "path", "source.path");
    c.target = get<std::string>(src, "target", "source.target");
    c.options.header = get_or<bool>(src, "header", "source.header", true);
    c.options.delimiter =
        parse_delimiter(get_or<std::string>(src, "delimiter", "source.delimiter", ","));
    c.options.drop_non_numeric = get_or<bool>(src, "drop_non_numeric", "source.drop_non_numeric", false);
    c.options.add_intercept = get_or<bool>(src, "add_intercept", "source.add_intercept", false);
    c.options.skip_malformed = get_or<bool>(src, "skip_malformed", "source.skip_malformed", false);
    c.options.standardize = get_or<bool>(src, "standardize", "source.standardize", false);
    c.unbiased_sigma = get_or<bool>(src, "unbiased_sigma", "source.unbiased_sigma", false);
    c.shuffle = get_or<bool>(src, "shuffle", "source.shuffle", false);
  } else {
    throw ConfigError("source.kind", "expected 'synthetic' or 'csv', got '" + kind + "'");
  }
}

}  // namespace

std::string to_string(Method m) {
  for (const auto& e : kMethods)
    if (e.m == m) return e.name;
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (const auto& e : kMethods)
    if (name == e.name) return e.m;
  throw ConfigError("methods", "unknown method '" + name + "'");
}

bool uses_preliminary_fit(Method m) { return m == Method::samle1 || m == Method::samle2; }

bool adaptive_censoring(Method m) {
  return m == Method::aclms || m == Method::acrls || m == Method::raclms || m == Method::racrls;
}

bool robust(Method m) { return m == Method::raclms || m == Method::racrls; }

StepSize StepSpec::build() const {
  if (kind == "constant") return StepSize::constant(mu);
  if (kind == "diminishing") return StepSize::diminishing(mu, offset);
  throw ConfigError("step.kind", "expected 'constant' or 'diminishing', got '" + kind + "'");
}

SymMatrix parse_cov(const std::string& text, int p) {
  if (text == "identity") return SymMatrix::Identity(p, p);
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (head == "toeplitz") {
      const auto comma = args.find(',');
      if (comma == std::string::npos) throw ConfigError("cov", "toeplitz needs 'a,r'");
      return datagen::toeplitz_cov(p, std::stod(args.substr(0, comma)),
                                   std::stod(args.substr(comma + 1)));
    }
    if (head == "diag") {
      const double v = std::stod(args);
      if (!(v > 0.0)) throw ConfigError("cov", "diag variance must be positive");
      return v * SymMatrix::Identity(p, p);
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("cov", "cannot parse '" + text + "'");
  }
  throw ConfigError("cov", "expected identity, toeplitz:a,r or diag:v; got '" + text + "'");
}

void ExperimentConfig::validate() const {
  if (schema != kConfigSchema) {
    throw ConfigError("schema", "expected '" + std::string(kConfigSchema) + "', got '" + schema + "'");
  }
  if (methods.empty()) throw ConfigError("methods", "must list at least one method");
  if (replicates < 1) throw ConfigError("replicates", "must be at least 1");
  if (threads < 1) throw ConfigError("threads", "must be at least 1");
  if (passes < 1) throw ConfigError("passes", "must be at least 1");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ConfigError("ratio", "must lie in (0, 1]");
  if (eps && !(*eps > 0.0)) throw ConfigError("eps", "must be positive");
  if (!(tau_o > 0.0)) throw ConfigError("tau_o", "must be positive");
  if (record != "geometric" && record != "final" && record.rfind("every:", 0) != 0) {
    throw ConfigError("record", "expected geometric, final or every:N");
  }
  if (record.rfind("every:", 0) == 0) {
    try {
      if (std::stoll(record.substr(6)) < 1) throw ConfigError("record", "every:N needs N >= 1");
    } catch (const std::logic_error&) {
      throw ConfigError("record", "every:N needs an integer N");
    }
  }
  step.build();

  const std::string& k = threshold.kind;
  const bool nac_kind = k == "nac-exact" || k == "nac-clt";
  const bool ac_kind = k == "ac-online" || k == "ac-offline" || k == "ac-schedule";
  if (!nac_kind && !ac_kind && k != "constant") {
    throw ConfigError("threshold.kind", "unknown plan '" + k + "'");
  }
  if (k == "constant" && !(threshold.tau >= 0.0)) {
    throw ConfigError("threshold.tau", "must be non-negative");
  }
  if ((nac_kind || k == "ac-online" || k == "ac-offline") &&
      !(threshold.target >= 0.0 && threshold.target < 1.0)) {
    throw ConfigError("threshold.target", "must lie in [0, 1)");
  }
  const int p = synthetic ? stream.p : 0;
  for (Method m : methods) {
    if (uses_preliminary_fit(m)) {
      if (ac_kind) {
        throw ConfigError("threshold.kind", "plan '" + k + "' is adaptive; " + to_string(m) +
                                                " needs a constant or nac-* plan");
      }
      if (K < 1 || (synthetic && K < p)) throw ConfigError("K", to_string(m) + " needs K >= p");
      if (k == "constant" && !(threshold.tau > 0.0)) {
        throw ConfigError("threshold.tau", to_string(m) + " needs tau > 0");
      }
    }
    if (adaptive_censoring(m)) {
      if (nac_kind) {
        throw ConfigError("threshold.kind", "plan '" + k + "' is non-adaptive; " + to_string(m) +
                                                " needs a constant or ac-* plan");
      }
      if (k == "ac-online" && (m == Method::aclms || m == Method::raclms)) {
        throw ConfigError("threshold.kind", "ac-online needs a second-order method");
      }
    }
    if (robust(m) && std::isfinite(tau_o) && k == "constant" && !(threshold.tau < tau_o)) {
      throw ConfigError("tau_o", "must exceed the censoring threshold");
    }
  }
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  reject_unknown(doc, "",
                 {"schema", "source", "methods", "threshold", "tau_o", "step", "eps", "K",
                  "ratio", "replicates", "record", "seed", "threads", "passes", "notes"});
  ExperimentConfig cfg;
  cfg.schema = get<std::string>(doc, "schema", "schema");
  if (!doc.contains("source")) throw ConfigError("source", "missing required field");
  parse_source(doc.at("source"), cfg);

  for (const auto& name : get<std::vector<std::string>>(doc, "methods", "methods")) {
    cfg.methods.push_back(parse_method(name));
  }
  if (doc.contains("threshold")) {
    const json& t = doc.at("threshold");
    if (!t.is_object()) throw ConfigError("threshold", "must be an object");
    reject_unknown(t, "threshold", {"kind", "tau", "target", "schedule"});
    cfg.threshold.kind = get_or<std::string>(t, "kind", "threshold.kind", "constant");
    cfg.threshold.tau = get_or<double>(t, "tau", "threshold.tau", 0.0);
    cfg.threshold.target = get_or<double>(t, "target", "threshold.target", 0.0);
    cfg.threshold.schedule =
        get_or<std::vector<double>>(t, "schedule", "threshold.schedule", {});
    if (cfg.threshold.kind == "ac-schedule" && cfg.threshold.schedule.empty()) {
      throw ConfigError("threshold.schedule", "missing required field");
    }
  }
  if (doc.contains("tau_o")) {
    if (doc.at("tau_o").is_string() && doc.at("tau_o").get<std::string>() == "inf") {
      cfg.tau_o = std::numeric_limits<double>::infinity();
    } else {
      cfg.tau_o = get<double>(doc, "tau_o", "tau_o");
    }
  }
  if (doc.contains("step")) {
    const json& s = doc.at("step");
    if (!s.is_object()) throw ConfigError("step", "must be an object");
    reject_unknown(s, "step", {"kind", "mu", "offset"});
    cfg.step.kind = get_or<std::string>(s, "kind", "step.kind", "constant");
    cfg.step.mu = get_or<double>(s, "mu", "step.mu", 0.01);
    cfg.step.offset = get_or<double>(s, "offset", "step.offset", 0.0);
  }
  if (doc.contains("eps")) cfg.eps = get<double>(doc, "eps", "eps");
  cfg.K = get_or<int>(doc, "K", "K", 0);
  cfg.ratio = get_or<double>(doc, "ratio", "ratio", 1.0);
  cfg.replicates = get_or<int>(doc, "replicates", "replicates", 1);
  cfg.record = get_or<std::string>(doc, "record", "record", "geometric");
  cfg.seed = get_or<std::uint64_t>(doc, "seed", "seed", 0);
  cfg.threads = get_or<int>(doc, "threads", "threads", 1);
  cfg.passes = get_or<int>(doc, "passes", "passes", 1);
  cfg.notes = get_or<std::vector<std::string>>(doc, "notes", "notes", {});
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["schema"] = cfg.schema;
  if (cfg.synthetic) {
    const StreamSpec& s = cfg.stream;
    json src = {{"kind", "synthetic"},
                {"p", s.p},
                {"D", s.D},
                {"design", s.design == StreamSpec::Design::gaussian ? "gaussian" : "t"},
                {"cov", cfg.cov},
                {"sigma", s.sigma}};
    if (s.design == StreamSpec::Design::student_t) src["df"] = s.df;
    if (s.noise_clip > 0.0) src["noise_clip"] = s.noise_clip;
    if (s.outlier_prob > 0.0) src["outliers"] = {{"prob", s.outlier_prob}, {"variance", s.outlier_var}};
    if (s.theta) src["theta"] = std::vector<double>(s.theta->data(), s.theta->data() + s.theta->size());
    doc["source"] = src;
  } else {
    const CsvSource& c = cfg.csv;
    doc["source"] = {{"kind", "csv"},
                     {"path", c.path},
                     {"target", c.target},
                     {"header", c.options.header},
                     {"delimiter", std::string(1, c.options.delimiter)},
                     {"drop_non_numeric", c.options.drop_non_numeric},
                     {"add_intercept", c.options.add_intercept},
                     {"skip_malformed", c.options.skip_malformed},
                     {"standardize", c.options.standardize},
                     {"unbiased_sigma", c.unbiased_sigma},
                     {"shuffle", c.shuffle}};
  }
  std::vector<std::string> names;
  for (Method m : cfg.methods) names.push_back(to_string(m));
  doc["methods"] = names;
  json t = {{"kind", cfg.threshold.kind}};
  if (cfg.threshold.kind == "constant") t["tau"] = cfg.threshold.tau;
  else if (cfg.threshold.kind == "ac-schedule") t["schedule"] = cfg.threshold.schedule;
  else t["target"] = cfg.threshold.target;
  doc["threshold"] = t;
  if (std::isfinite(cfg.tau_o)) doc["tau_o"] = cfg.tau_o;
  else doc["tau_o"] = "inf";
  doc["step"] = {{"kind", cfg.step.kind}, {"mu", cfg.step.mu}, {"offset", cfg.step.offset}};
  if (cfg.eps) doc["eps"] = *cfg.eps;
  doc["K"] = cfg.K;
  doc["ratio"] = cfg.ratio;
  doc["replicates"] = cfg.replicates;
  doc["record"] = cfg.record;
  doc["seed"] = cfg.seed;
  doc["threads"] = cfg.threads;
  doc["passes"] = cfg.passes;
  if (!cfg.notes.empty()) doc["notes"] = cfg.notes;
  return doc;
}

}  // namespace cendre
