#include "app.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cendre/config.hpp"
#include "cendre/datagen.hpp"
#include "cendre/errors.hpp"
#include "cendre/harness.hpp"
#include "cendre/ingest.hpp"

namespace cendre::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kIo = 1;
constexpr int kConfig = 2;
constexpr int kNumeric = 3;

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out = ".";
};

void add_common(CLI::App* sub, Common& c, bool needs_config) {
  auto* opt = sub->add_option("--config", c.config, "Experiment config (JSON)");
  if (needs_config) opt->required();
  sub->add_option("--seed", c.seed, "Root seed (default: $CENDRE_SEED, then the config)");
  sub->add_option("--threads", c.threads, "Replicate worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "Output directory");
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("CENDRE_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto s = std::stoull(v, &used);
    if (v[used] != '\0') throw std::invalid_argument(v);
    return s;
  } catch (const std::logic_error&) {
    throw ConfigError("CENDRE_SEED", std::string("not an unsigned integer: ") + v);
  }
}

// Flag, then environment, then config.
void apply_overrides(ExperimentConfig& cfg, const CLI::App* sub, const Common& c) {
  if (sub->count("--seed") > 0) {
    cfg.seed = c.seed;
  } else if (auto s = env_seed()) {
    cfg.seed = *s;
  }
  if (sub->count("--threads") > 0) cfg.threads = c.threads;
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
  return fs::path(dir);
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

void append_log(const fs::path& dir, const std::string& line) {
  std::ofstream log(dir / "cendre.log", std::ios::app);
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  log << stamp << ' ' << line << '\n';
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(' ');
    if (a == std::string::npos) continue;
    out.push_back(item.substr(a, item.find_last_not_of(' ') - a + 1));
  }
  return out;
}

// ---- gen ----

struct GenArgs {
  int p = 10;
  std::uint64_t D = 1000;
  double sigma = 1.0;
  std::string design = "gaussian";
  double df = 3.0;
  std::string cov = "identity";
  double outlier_prob = 0.0;
  double outlier_var = 0.0;
  std::string name = "data";
};

int cmd_gen(const CLI::App* sub, const Common& c, const GenArgs& g) {
  ExperimentConfig cfg;
  if (!c.config.empty()) {
    cfg = load_config(c.config);
    if (!cfg.synthetic) throw ConfigError("source.kind", "gen needs a synthetic source");
  }
  StreamSpec& s = cfg.stream;
  if (c.config.empty() || sub->count("--p")) s.p = g.p;
  if (c.config.empty() || sub->count("--D")) s.D = g.D;
  if (c.config.empty() || sub->count("--sigma")) s.sigma = g.sigma;
  if (c.config.empty() || sub->count("--design")) {
    s.design = g.design == "gaussian" ? StreamSpec::Design::gaussian : StreamSpec::Design::student_t;
  }
  if (c.config.empty() || sub->count("--df")) s.df = g.df;
  if (c.config.empty() || sub->count("--cov")) cfg.cov = g.cov;
  s.sigma_x = parse_cov(cfg.cov, s.p);
  if (c.config.empty() || sub->count("--outlier-prob")) s.outlier_prob = g.outlier_prob;
  if (c.config.empty() || sub->count("--outlier-var")) s.outlier_var = g.outlier_var;
  if (s.theta && s.theta->size() != s.p) s.theta.reset();
  apply_overrides(cfg, sub, c);
  s.seed = cfg.seed;

  const datagen::StreamGenerator gen(s);
  Dataset ds;
  datagen::materialize(gen, 0, s.D, ds.design, ds.response);
  for (int j = 0; j < s.p; ++j) ds.column_names.push_back("x" + std::to_string(j));
  ds.target_name = "y";

  const fs::path dir = ensure_dir(c.out);
  const fs::path csv = dir / (g.name + ".csv");
  ingest::write_csv(ds, csv.string());
  json truth = {{"theta", std::vector<double>(gen.theta().data(), gen.theta().data() + s.p)},
                {"sigma", s.sigma},
                {"seed", s.seed},
                {"p", s.p},
                {"D", s.D},
                {"design", s.design == StreamSpec::Design::gaussian ? "gaussian" : "t"},
                {"cov", cfg.cov}};
  if (s.design == StreamSpec::Design::student_t) truth["df"] = s.df;
  if (s.outlier_prob > 0.0) truth["outliers"] = {{"prob", s.outlier_prob}, {"variance", s.outlier_var}};
  write_json(dir / (g.name + ".truth.json"), truth);
  append_log(dir, "gen wrote " + csv.string());
  std::cout << csv.string() << '\n';
  return kOk;
}

// ---- run ----

struct RunArgs {
  int replicates = 0;
};

int cmd_run(const CLI::App* sub, const Common& c, const RunArgs& a) {
  ExperimentConfig cfg = load_config(c.config);
  apply_overrides(cfg, sub, c);
  if (sub->count("--replicates")) cfg.replicates = a.replicates;
  cfg.validate();
  const MonteCarloResult res = harness::monte_carlo(cfg);
  const fs::path dir = ensure_dir(c.out);
  harness::write_results_csv((dir / "results.csv").string(), res);
  harness::write_curves_csv((dir / "curves.csv").string(), res);
  write_json(dir / "summary.json", harness::summary(res));
  append_log(dir, "run " + c.config + " seed=" + std::to_string(cfg.seed));
  for (const auto& curve : res.curves) {
    const auto& f = curve.points.back();
    std::cout << to_string(curve.method) << " n=" << f.n << " mse=" << f.mean_mse
              << " rse=" << f.mean_rse << " censor=" << f.mean_censor_ratio << '\n';
  }
  return kOk;
}

// ---- sweep ----

struct SweepArgs {
  std::string axis;
  std::string values;
};

int cmd_sweep(const CLI::App* sub, const Common& c, const SweepArgs& a) {
  ExperimentConfig cfg = load_config(c.config);
  apply_overrides(cfg, sub, c);
  const auto values = split_list(a.values);
  const auto points = harness::sweep(cfg, a.axis, values);
  const fs::path dir = ensure_dir(c.out);
  harness::write_results_csv((dir / "sweep_results.csv").string(), points, a.axis);
  harness::write_curves_csv((dir / "sweep_curves.csv").string(), points, a.axis);
  json all = json::array();
  for (const auto& sp : points) {
    json s = harness::summary(sp.result);
    s[a.axis] = sp.value;
    all.push_back(s);
  }
  write_json(dir / "sweep_summary.json", all);
  append_log(dir, "sweep " + c.config + " axis=" + a.axis);
  std::cout << "wrote " << points.size() << " sweep points to " << dir.string() << '\n';
  return kOk;
}

// ---- bench ----

struct BenchArgs {
  double ratio = 0.0;
  int repeats = 3;
};

int cmd_bench(const CLI::App* sub, const Common& c, const BenchArgs& a) {
  ExperimentConfig cfg = load_config(c.config);
  apply_overrides(cfg, sub, c);
  if (sub->count("--ratio")) {
    cfg.ratio = a.ratio;
    if (cfg.threshold.kind == "ac-online" || cfg.threshold.kind == "ac-offline") {
      cfg.threshold.target = 1.0 - a.ratio;
    }
  }
  cfg.validate();
  const auto rows = harness::bench(cfg, a.repeats);
  json report = {{"config", to_json(cfg)}, {"methods", json::array()}};
  for (const auto& r : rows) {
    report["methods"].push_back({{"method", to_string(r.method)},
                                 {"seconds", r.seconds},
                                 {"multiplies", r.multiplies},
                                 {"kept", r.kept},
                                 {"processed", r.processed}});
  }
  if (sub->count("--out")) {
    const fs::path dir = ensure_dir(c.out);
    write_json(dir / "bench.json", report);
  }
  std::cout << report.dump(2) << '\n';
  return kOk;
}

// ---- info ----

int cmd_info(const Common& c) {
  json doc = {{"schema", kConfigSchema},
              {"methods",
               {"lms", "rls", "ac-lms", "ac-rls", "rac-lms", "rac-rls", "samle1", "samle2",
                "kaczmarz", "srht", "uniform", "batch-lse"}},
              {"threshold_plans",
               {"constant", "nac-exact", "nac-clt", "ac-online", "ac-offline", "ac-schedule"}},
              {"exit_codes", {{"ok", kOk}, {"io", kIo}, {"config", kConfig}, {"numeric", kNumeric}}}};
  if (!c.config.empty()) doc["config"] = to_json(load_config(c.config));
  std::cout << doc.dump(2) << '\n';
  return kOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"cendre: streaming censored regression experiments"};
  app.require_subcommand(1, 1);

  Common gen_c, run_c, sweep_c, bench_c, info_c;
  GenArgs gen_a;
  RunArgs run_a;
  SweepArgs sweep_a;
  BenchArgs bench_a;

  auto* gen = app.add_subcommand("gen", "Write a synthetic dataset CSV and a truth sidecar");
  add_common(gen, gen_c, false);
  gen->add_option("--p", gen_a.p, "Dimension")->check(CLI::PositiveNumber);
  gen->add_option("--D", gen_a.D, "Number of samples")->check(CLI::PositiveNumber);
  gen->add_option("--sigma", gen_a.sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
  gen->add_option("--design", gen_a.design, "gaussian or t")->check(CLI::IsMember({"gaussian", "t"}));
  gen->add_option("--df", gen_a.df, "Degrees of freedom for the t design");
  gen->add_option("--cov", gen_a.cov, "identity, toeplitz:a,r or diag:v");
  gen->add_option("--outlier-prob", gen_a.outlier_prob, "Outlier probability");
  gen->add_option("--outlier-var", gen_a.outlier_var, "Outlier variance");
  gen->add_option("--name", gen_a.name, "Base file name");

  auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment");
  add_common(run, run_c, true);
  run->add_option("--replicates", run_a.replicates, "Override the replicate count")
      ->check(CLI::PositiveNumber);

  auto* sw = app.add_subcommand("sweep", "Repeat an experiment along one axis");
  add_common(sw, sweep_c, true);
  sw->add_option("--axis", sweep_a.axis, "tau, ratio or method")
      ->required()
      ->check(CLI::IsMember({"tau", "ratio", "method"}));
  sw->add_option("--values", sweep_a.values, "Comma-separated axis values")->required();

  auto* bn = app.add_subcommand("bench", "Time methods and report multiply counts");
  add_common(bn, bench_c, true);
  bn->add_option("--ratio", bench_a.ratio, "Kept fraction d/D")->check(CLI::Range(0.0, 1.0));
  bn->add_option("--repeats", bench_a.repeats, "Timing repeats (minimum is reported)")
      ->check(CLI::PositiveNumber);

  auto* info = app.add_subcommand("info", "List methods, plans and schema; validate a config");
  info->add_option("--config", info_c.config, "Config to validate and echo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*gen) return cmd_gen(gen, gen_c, gen_a);
    if (*run) return cmd_run(run, run_c, run_a);
    if (*sw) return cmd_sweep(sw, sweep_c, sweep_a);
    if (*bn) return cmd_bench(bn, bench_c, bench_a);
    if (*info) return cmd_info(info_c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const SingularityError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumeric;
  } catch (const DomainError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kConfig;
}

}  // namespace cendre::cli
