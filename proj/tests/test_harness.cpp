#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cendre/errors.hpp"
#include "cendre/harness.hpp"
#include "cendre/rng.hpp"
#include "oracles.hpp"

using namespace cendre;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ExperimentConfig base(int p, std::uint64_t D, std::vector<Method> methods) {
  ExperimentConfig cfg;
  cfg.stream.p = p;
  cfg.stream.D = D;
  cfg.stream.sigma = 1.0;
  cfg.methods = std::move(methods);
  cfg.seed = 11;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_trace(const TrialTrace& a, const TrialTrace& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.points[i].n != b.points[i].n || a.points[i].mse != b.points[i].mse ||
        a.points[i].multiplies != b.points[i].multiplies)
      return false;
  }
  return a.theta == b.theta;
}

}  // namespace

TEST_CASE("record_points") {
  CHECK(harness::record_points("final", 10) == std::vector<std::uint64_t>{10});
  CHECK(harness::record_points("geometric", 10) == std::vector<std::uint64_t>{1, 2, 4, 8, 10});
  CHECK(harness::record_points("geometric", 8) == std::vector<std::uint64_t>{1, 2, 4, 8});
  CHECK(harness::record_points("every:3", 10) == std::vector<std::uint64_t>{3, 6, 9, 10});
  CHECK_THROWS_AS(harness::record_points("sometimes", 10), ConfigError);
}

TEST_CASE("one replicate equals run_trial") {
  auto cfg = base(4, 300, {Method::lms, Method::rls});
  cfg.replicates = 1;
  const auto mc = harness::monte_carlo(cfg);
  for (Method m : cfg.methods) {
    const auto t = harness::run_trial(cfg, m, derive_seed(cfg.seed, 0));
    const auto& c = mc.curve(m);
    REQUIRE(c.points.size() == t.points.size());
    for (std::size_t i = 0; i < t.points.size(); ++i) {
      CHECK(c.points[i].mean_mse == t.points[i].mse);
      CHECK(c.points[i].std_mse == 0.0);
    }
  }
}

TEST_CASE("results do not depend on the thread count") {
  auto cfg = base(5, 500, {Method::aclms, Method::acrls, Method::srht});
  cfg.threshold.kind = "constant";
  cfg.threshold.tau = 0.8;
  cfg.ratio = 0.5;
  cfg.replicates = 9;
  cfg.threads = 1;
  const auto a = harness::monte_carlo(cfg);
  cfg.threads = 4;
  const auto b = harness::monte_carlo(cfg);
  REQUIRE(a.traces.size() == b.traces.size());
  for (std::size_t i = 0; i < a.traces.size(); ++i) CHECK(same_trace(a.traces[i], b.traces[i]));
  CHECK(harness::summary(a)["methods"].dump() == harness::summary(b)["methods"].dump());
}

TEST_CASE("traces are sorted and rse is normalized mse") {
  auto cfg = base(3, 200, {Method::rls, Method::lms});
  cfg.replicates = 3;
  const auto mc = harness::monte_carlo(cfg);
  for (std::size_t i = 1; i < mc.traces.size(); ++i) {
    const auto& a = mc.traces[i - 1];
    const auto& b = mc.traces[i];
    CHECK(std::make_pair(to_string(a.method), a.seed) < std::make_pair(to_string(b.method), b.seed));
  }
  for (const auto& t : mc.traces)
    for (const auto& pt : t.points)
      CHECK(pt.rse * t.theta_o.squaredNorm() == doctest::Approx(pt.mse).epsilon(1e-12));
}

TEST_CASE("noiseless RLS identifies theta after p steps") {
  auto cfg = base(6, 50, {Method::rls});
  cfg.stream.sigma = 0.0;
  cfg.eps = 1e-12;
  cfg.record = "every:1";
  const auto t = harness::run_trial(cfg, Method::rls, 5);
  CHECK(t.points[4].mse > 1e-6);
  for (std::size_t i = 5; i < t.points.size(); ++i) CHECK(t.points[i].mse <= 1e-16);
}

TEST_CASE("AC-RLS with tau = 0 reproduces RLS") {
  auto cfg = base(5, 400, {Method::rls, Method::acrls});
  cfg.threshold.tau = 0.0;
  cfg.record = "every:7";
  const auto a = harness::run_trial(cfg, Method::rls, 3);
  const auto b = harness::run_trial(cfg, Method::acrls, 3);
  CHECK(same_trace(a, b));
  CHECK(b.kept == b.processed);
}

TEST_CASE("offline AC threshold hits its censoring target") {
  auto cfg = base(30, 10000, {Method::acrls});
  cfg.threshold.kind = "ac-offline";
  cfg.threshold.target = 0.7;
  cfg.record = "final";
  const auto t = harness::run_trial(cfg, Method::acrls, 17);
  const double ratio = 1.0 - static_cast<double>(t.kept) / t.processed;
  CHECK(std::abs(ratio - 0.7) <= 0.03);
  CHECK(t.points.back().censor_ratio == doctest::Approx(ratio));
}

TEST_CASE("theory_bounds") {
  auto cfg = base(10, 10000, {Method::acrls});
  cfg.threshold.tau = 1.0;
  const auto b = harness::theory_bounds(cfg);
  CHECK(b.alpha == doctest::Approx(2.0 * static_cast<double>(oracle::q(1.0))).epsilon(1e-10));
  CHECK(b.trace_rinv == doctest::Approx(10.0));
  CHECK(b.acrls_mse_lower(10000) == doctest::Approx(1e-3));
  CHECK(b.acrls_mse_upper(10000) == doctest::Approx(3.152e-3).epsilon(2e-4));

  cfg.threshold.tau = 0.0;
  const auto z = harness::theory_bounds(cfg);
  CHECK(z.acrls_mse_upper(500) == doctest::Approx(z.acrls_mse_lower(500)));

  cfg.threshold.kind = "ac-offline";
  cfg.threshold.target = 0.5;
  CHECK_THROWS_AS(harness::theory_bounds(cfg), ConfigError);
  cfg.threshold.kind = "constant";
  cfg.stream.design = StreamSpec::Design::student_t;
  cfg.stream.df = 2.0;
  CHECK_THROWS_AS(harness::theory_bounds(cfg), ConfigError);
}

TEST_CASE("strong-convexity constant matches the expected censored Hessian") {
  // At theta_o the expected Hessian of the AC-LMS objective is
  // E[1{|v| >= tau sigma} x x'] = 2Q(tau) R. Estimate its smallest eigenvalue.
  auto cfg = base(4, 1, {Method::aclms});
  cfg.stream.sigma_x = datagen::toeplitz_cov(4, 2.0, 0.5);
  cfg.threshold.tau = 0.7;
  const auto b = harness::theory_bounds(cfg);
  StreamSpec spec = cfg.stream;
  spec.seed = 99;
  datagen::StreamGenerator g(spec);
  SymMatrix H = SymMatrix::Zero(4, 4);
  const int N = 200000;
  for (int n = 0; n < N; ++n) {
    const auto s = g.at(static_cast<std::uint64_t>(n));
    if (std::abs(s.y - s.x.dot(g.theta())) >= 0.7) H += s.x * s.x.transpose() / N;
  }
  Eigen::SelfAdjointEigenSolver<SymMatrix> es(H);
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(b.alpha).epsilon(0.05));
}

TEST_CASE("regret step and bound") {
  CHECK(harness::regret_step(50, 2.0, 1.0, 1.0) == doctest::Approx(0.2));
  CHECK(harness::regret_bound(50, 2.0, 1.0, 1.0) == doctest::Approx(20.0));
}

TEST_CASE("ratio sweep cardinality and byte-identical outputs") {
  auto cfg = base(5, 600, {Method::acrls, Method::srht, Method::uniform});
  cfg.threshold.kind = "ac-offline";
  cfg.threshold.target = 0.5;
  cfg.record = "final";
  cfg.replicates = 2;
  const std::vector<std::string> ratios{"0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "0.9"};
  const auto pts = harness::sweep(cfg, "ratio", ratios);
  CHECK(pts.size() == 9);
  const fs::path dir = fs::temp_directory_path() / "cendre_harness_sweep";
  fs::create_directories(dir);
  harness::write_curves_csv((dir / "a.csv").string(), pts, "ratio");
  const auto text = slurp(dir / "a.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 27);
  harness::write_curves_csv((dir / "b.csv").string(), harness::sweep(cfg, "ratio", ratios), "ratio");
  CHECK(slurp(dir / "b.csv") == text);
  fs::remove_all(dir);

  CHECK_THROWS_AS(harness::sweep(cfg, "ratio", {}), ConfigError);
  CHECK_THROWS_AS(harness::sweep(cfg, "colour", {"1"}), ConfigError);
  const auto taus = harness::sweep(base(3, 100, {Method::acrls}), "tau", {"0", "1"});
  CHECK(taus.size() == 2);
  CHECK(taus[1].result.cfg.threshold.tau == 1.0);
}

TEST_CASE("csv experiments use the surrogate truth") {
  const fs::path dir = fs::temp_directory_path() / "cendre_harness_csv";
  fs::create_directories(dir);
  std::ofstream out(dir / "d.csv");
  out << "a,b,y\n";
  Rng rng(4);
  for (int i = 0; i < 400; ++i) {
    const double a = rng.normal(), b = rng.normal();
    out << a << ',' << b << ',' << 2 * a - b + 0.1 * rng.normal() << '\n';
  }
  out.close();
  ExperimentConfig cfg;
  cfg.synthetic = false;
  cfg.csv.path = (dir / "d.csv").string();
  cfg.csv.target = "y";
  cfg.methods = {Method::rls, Method::batch_lse};
  cfg.record = "final";
  const auto ctx = harness::prepare(cfg);
  CHECK(ctx.truth.theta[0] == doctest::Approx(2.0).epsilon(0.05));
  const auto mc = harness::monte_carlo(cfg);
  // The full-data LSE is the surrogate truth itself.
  CHECK(mc.curve(Method::batch_lse).points.back().mean_mse < 1e-20);
  CHECK(mc.curve(Method::rls).points.back().mean_mse < 1e-3);
  fs::remove_all(dir);
}

TEST_CASE("bench reports every method") {
  auto cfg = base(8, 2000, {Method::rls, Method::acrls});
  cfg.threshold.kind = "ac-offline";
  cfg.threshold.target = 0.9;
  const auto rows = harness::bench(cfg, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].kept < rows[0].kept);
  CHECK(rows[1].multiplies < rows[0].multiplies);
  CHECK(rows[0].seconds > 0.0);
}
