#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cendre/errors.hpp"
#include "cendre/ingest.hpp"
#include "oracles.hpp"

using namespace cendre;
using namespace cendre::ingest;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cendre_ingest_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& body) const {
    const auto p = path / name;
    std::ofstream(p) << body;
    return p.string();
  }
};

std::string synthetic_csv(int p, int D, double sigma, unsigned seed, Eigen::VectorXd* theta = nullptr) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01;
  const auto th = oracle::random_vector(p, gen);
  if (theta) *theta = th;
  std::ostringstream os;
  os.precision(17);
  for (int j = 0; j < p; ++j) os << "f" << j << ",";
  os << "y\n";
  for (int i = 0; i < D; ++i) {
    double y = 0.0;
    for (int j = 0; j < p; ++j) {
      const double v = n01(gen);
      y += v * th[j];
      os << v << ",";
    }
    os << y + sigma * n01(gen) << "\n";
  }
  return os.str();
}

}  // namespace

TEST_CASE("three-row fixture") {
  TempDir dir;
  const auto path = dir.write("a.csv", "x,y\n1,2\n3,4\n5,6.5\n");
  const auto ds = load_csv(path, "y");
  CHECK(ds.rows() == 3);
  CHECK(ds.dim() == 1);
  CHECK(ds.design(2, 0) == 5.0);
  CHECK(ds.response[2] == 6.5);
  CHECK(ds.target_name == "y");
  CHECK(ds.column_names == std::vector<std::string>{"x"});

  CsvOptions semi;
  semi.delimiter = ';';
  const auto ds2 = load_csv(dir.write("b.csv", "x;y\n1;2\n3;4\n5;6.5\n"), "y", semi);
  CHECK(ds2.design == ds.design);
  CHECK(ds2.response == ds.response);

  CsvOptions nohead;
  nohead.header = false;
  const auto ds3 = load_csv(dir.write("c.csv", "1,2\n3,4\n5,6.5\n"), "1", nohead);
  CHECK(ds3.response == ds.response);
  CHECK(ds3.column_names == std::vector<std::string>{"c0"});
  // Target by index when a header is present.
  CHECK(load_csv(path, "0").target_name == "x");
}

TEST_CASE("protein-like fixture") {
  TempDir dir;
  const auto path = dir.write("protein.csv", synthetic_csv(9, 100, 1.0, 3));
  CHECK(load_csv(path, "y").dim() == 9);
  CsvOptions opts;
  opts.add_intercept = true;
  const auto ds = load_csv(path, "y", opts);
  CHECK(ds.rows() == 100);
  CHECK(ds.dim() == 10);
  CHECK(ds.design.col(9).isOnes());
  CHECK(ds.column_names.back() == "(intercept)");
  CHECK(ds.provenance["log"].back()["action"] == "add_intercept");
}

TEST_CASE("errors") {
  TempDir dir;
  const auto good = dir.write("g.csv", "x,y\n1,2\n3,4\n5,6\n");
  try {
    load_csv(good, "z");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "target");
  }
  const auto bad = dir.write("bad.csv", "x,y\n1,2\n3\n5,6\n7,8\n");
  try {
    load_csv(bad, "y");
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CsvOptions skip;
  skip.skip_malformed = true;
  const auto ds = load_csv(bad, "y", skip);
  CHECK(ds.rows() == 3);
  CHECK(ds.provenance["log"][0]["action"] == "skip_row");

  const auto text = dir.write("t.csv", "x,y\n1,2\nfoo,4\n5,6\n");
  try {
    load_csv(text, "y");
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_csv((dir.path / "missing.csv").string(), "y"), IoError);
  CHECK_THROWS_AS(load_csv(dir.write("short.csv", "a,b,y\n1,2,3\n"), "y"), ConfigError);
}

TEST_CASE("drop_non_numeric") {
  TempDir dir;
  const auto path = dir.write("n.csv", "id,x,y\na,1,2\nb,3,4\nc,5,7\nd,2,2\n");
  CsvOptions opts;
  opts.drop_non_numeric = true;
  const auto ds = load_csv(path, "y", opts);
  CHECK(ds.dim() == 1);
  CHECK(ds.column_names == std::vector<std::string>{"x"});
  CHECK(ds.provenance["log"][0]["column"] == "id");
}

TEST_CASE("write_csv round-trips exactly") {
  TempDir dir;
  const auto ds = load_csv(dir.write("r.csv", synthetic_csv(4, 50, 0.5, 4)), "y");
  const auto out = (dir.path / "out.csv").string();
  write_csv(ds, out);
  const auto back = load_csv(out, "y");
  CHECK(back.design == ds.design);
  CHECK(back.response == ds.response);
  CHECK(back.column_names == ds.column_names);

  write_provenance(ds, (dir.path / "prov.json").string());
  std::ifstream pin(dir.path / "prov.json");
  const auto prov = nlohmann::json::parse(pin);
  CHECK(prov["rows"] == 50);
}

TEST_CASE("standardize") {
  TempDir dir;
  CsvOptions opts;
  opts.standardize = true;
  const auto ds = load_csv(dir.write("s.csv", "a,b,y\n1,10,0\n2,20,1\n3,30,1\n4,40,0\n"), "y", opts);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(ds.design.col(j).mean()) < 1e-14);
    CHECK(ds.design.col(j).squaredNorm() / 4 == doctest::Approx(1.0));
  }
  CHECK(ds.provenance["log"][0]["action"] == "standardize");
}

TEST_CASE("surrogate_truth") {
  TempDir dir;
  Eigen::VectorXd th;
  const auto clean = load_csv(dir.write("clean.csv", synthetic_csv(6, 500, 0.0, 5, &th)), "y");
  const auto t0 = surrogate_truth(clean);
  CHECK(t0.sigma < 1e-10);
  CHECK((t0.theta - th).norm() < 1e-10);

  const auto noisy = load_csv(dir.write("noisy.csv", synthetic_csv(5, 10000, 3.0, 6)), "y");
  const auto t1 = surrogate_truth(noisy);
  CHECK(t1.sigma == doctest::Approx(3.0).epsilon(0.05));
  // Residuals are orthogonal to every feature column.
  const Eigen::VectorXd r = noisy.response - noisy.design * t1.theta;
  CHECK((noisy.design.transpose() * r).cwiseAbs().maxCoeff() < 1e-8 * noisy.response.norm() * 100);
  const auto tu = surrogate_truth(noisy, true);
  CHECK(tu.sigma / t1.sigma == doctest::Approx(std::sqrt(10000.0 / 9995.0)).epsilon(1e-12));

  // Row order does not change the estimate.
  Dataset perm = noisy;
  perm.design = noisy.design.colwise().reverse();
  perm.response = noisy.response.reverse();
  CHECK(oracle::rel_err(surrogate_truth(perm).theta, t1.theta) < 1e-10);
}
