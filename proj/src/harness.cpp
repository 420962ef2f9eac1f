#include "cendre/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "cendre/censor.hpp"
#include "cendre/errors.hpp"
#include "cendre/rng.hpp"
#include "cendre/sketch.hpp"

namespace cendre {

const Curve& MonteCarloResult::curve(Method m) const {
  for (const auto& c : curves)
    if (c.method == m) return c;
  throw UsageError("no curve for method " + to_string(m));
}

double TheoryBounds::aclms_mse_diminishing(std::uint64_t n, double init_err2) const {
  const double nn = static_cast<double>(n);
  return std::exp(4.0 * L2 / (alpha * alpha)) / (nn * nn) * (init_err2 + delta / L2) +
         8.0 * delta * std::log(nn) / (alpha * alpha * nn);
}

double TheoryBounds::aclms_mse_constant(std::uint64_t n, double mu, double init_err2) const {
  const double nn = static_cast<double>(n);
  return 2.0 * std::exp(-(alpha * mu / 4.0 - 4.0 * L2 * mu * mu) * nn - 4.0 * L2 * mu * mu) *
             (init_err2 + delta / L2) +
         4.0 * mu * delta / alpha;
}

double TheoryBounds::acrls_mse_lower(std::uint64_t n) const {
  return trace_rinv * sigma * sigma / static_cast<double>(n);
}

double TheoryBounds::acrls_mse_upper(std::uint64_t n) const {
  return acrls_mse_lower(n) / (2.0 * numkit::gauss_q(tau));
}

namespace harness {

namespace {

// One replicate's view of the data: indices [0, K) feed the preliminary fit,
// [K, K + D) form the stream.
class ReplicateData {
 public:
  ReplicateData(const ExperimentConfig& cfg, std::uint64_t seed, const ExperimentContext& ctx)
      : K_(static_cast<std::uint64_t>(cfg.K)) {
    if (cfg.synthetic) {
      StreamSpec spec = cfg.stream;
      spec.seed = seed;
      gen_.emplace(spec);
      D_ = spec.D;
      theta_o_ = gen_->theta();
      sigma_ = spec.sigma;
    } else {
      if (!ctx.dataset) throw UsageError("csv experiment run without a prepared dataset");
      ds_ = ctx.dataset.get();
      const auto rows = static_cast<std::uint64_t>(ds_->design.rows());
      if (rows <= K_) throw ConfigError("K", "leaves no rows for the stream");
      D_ = rows - K_;
      order_.resize(rows);
      std::iota(order_.begin(), order_.end(), std::uint64_t{0});
      if (cfg.csv.shuffle) {
        Rng rng(derive_seed(seed, 7));
        for (std::uint64_t i = rows - 1; i > 0; --i) std::swap(order_[i], order_[rng.below(i + 1)]);
      }
      theta_o_ = ctx.truth.theta;
      sigma_ = ctx.truth.sigma;
    }
  }

  StreamSample at(std::uint64_t i) const {
    if (gen_) return gen_->at(i);
    const auto r = static_cast<Eigen::Index>(order_[i]);
    StreamSample s;
    s.x = ds_->design.row(r).transpose();
    s.y = ds_->response[r];
    return s;
  }

  void rows(std::uint64_t first, std::uint64_t count, Matrix& X, RealVector& y) const {
    const int p = static_cast<int>(theta_o_.size());
    X.resize(static_cast<Eigen::Index>(count), p);
    y.resize(static_cast<Eigen::Index>(count));
    for (std::uint64_t i = 0; i < count; ++i) {
      const StreamSample s = at(first + i);
      X.row(static_cast<Eigen::Index>(i)) = s.x.transpose();
      y[static_cast<Eigen::Index>(i)] = s.y;
    }
  }

  std::uint64_t K() const { return K_; }
  std::uint64_t D() const { return D_; }
  int p() const { return static_cast<int>(theta_o_.size()); }
  const RealVector& theta_o() const { return theta_o_; }
  double sigma() const { return sigma_; }

 private:
  std::uint64_t K_ = 0;
  std::uint64_t D_ = 0;
  std::optional<datagen::StreamGenerator> gen_;
  const Dataset* ds_ = nullptr;
  std::vector<std::uint64_t> order_;
  RealVector theta_o_;
  double sigma_ = 1.0;
};

ThresholdPlan build_plan(const ExperimentConfig& cfg, int p, const PreliminaryFit* fit,
                         std::uint64_t N) {
  const ThresholdSpec& t = cfg.threshold;
  if (t.kind == "constant") return ThresholdPlan::constant(t.tau);
  if (t.kind == "nac-exact") return ThresholdPlan::nac_exact(t.target, fit->gram_inv);
  if (t.kind == "nac-clt") return ThresholdPlan::nac_clt(t.target, p, fit->K);
  if (t.kind == "ac-online") return ThresholdPlan::ac_online(t.target, p);
  if (t.kind == "ac-offline") return ThresholdPlan::ac_offline(t.target, p);
  if (t.kind == "ac-schedule") {
    if (t.schedule.size() < N) {
      throw ConfigError("threshold.schedule", "has " + std::to_string(t.schedule.size()) +
                                                  " entries, the run needs " + std::to_string(N));
    }
    return ThresholdPlan::ac_schedule(t.schedule, p);
  }
  throw ConfigError("threshold.kind", "unknown plan '" + t.kind + "'");
}

class Recorder {
 public:
  Recorder(TrialTrace& trace, std::vector<std::uint64_t> schedule)
      : trace_(trace), schedule_(std::move(schedule)), norm2_(trace.theta_o.squaredNorm()) {}

  bool due(std::uint64_t n) const { return next_ < schedule_.size() && schedule_[next_] == n; }

  void record(std::uint64_t n, const RealVector& theta, double censor_ratio,
              std::uint64_t multiplies) {
    TracePoint pt;
    pt.n = n;
    pt.mse = (theta - trace_.theta_o).squaredNorm();
    pt.rse = pt.mse / norm2_;
    pt.censor_ratio = censor_ratio;
    pt.multiplies = multiplies;
    trace_.points.push_back(pt);
    ++next_;
  }

 private:
  TrialTrace& trace_;
  std::vector<std::uint64_t> schedule_;
  std::size_t next_ = 0;
  double norm2_;
};

void run_streaming(const ExperimentConfig& cfg, Method method, const ReplicateData& data,
                   TrialTrace& trace) {
  const int p = data.p();
  const std::uint64_t K = data.K();
  const std::uint64_t D = data.D();
  const std::uint64_t N = D * static_cast<std::uint64_t>(cfg.passes);
  const double sigma = data.sigma();

  std::optional<PreliminaryFit> fit;
  if (uses_preliminary_fit(method)) {
    Matrix XK;
    RealVector yK;
    data.rows(0, K, XK, yK);
    fit = estimators::preliminary_fit(XK, yK);
  }
  const bool censoring = uses_preliminary_fit(method) || adaptive_censoring(method);
  std::optional<ThresholdPlan> plan;
  if (censoring) plan = build_plan(cfg, p, fit ? &*fit : nullptr, N);

  EstimatorState s;
  switch (method) {
    case Method::lms:
    case Method::aclms:
    case Method::raclms:
      s = estimators::init_first_order(RealVector::Zero(p), cfg.step.build(), sigma);
      break;
    case Method::rls:
    case Method::acrls:
    case Method::racrls: {
      const double eps = cfg.eps ? *cfg.eps : estimators::default_rls_epsilon(data.at(K).x);
      s = estimators::init_rls(p, eps, sigma);
      break;
    }
    case Method::samle1:
      s = estimators::init_first_order(fit->theta_K, cfg.step.build(), sigma);
      break;
    case Method::samle2:
      s = estimators::init_samle2(*fit, sigma);
      break;
    default:
      throw UsageError("run_streaming: not a streaming method");
  }

  Recorder rec(trace, record_points(cfg.record, N));
  const bool charge_threshold = plan && plan->needs_step_matrix();
  const std::uint64_t threshold_cost = static_cast<std::uint64_t>(p) * (p + 1);

  for (std::uint64_t i = 0; i < N; ++i) {
    const StreamSample smp = data.at(K + i % D);
    const std::uint64_t n = s.n + 1;
    ThresholdQuery q;
    q.n = n;
    q.x = &smp.x;
    q.step_matrix = s.second_order() ? &s.P : nullptr;
    q.kept = s.kept;
    switch (method) {
      case Method::lms:
        estimators::lms_step(s, smp.y, smp.x);
        break;
      case Method::rls:
        estimators::rls_step(s, smp.y, smp.x);
        break;
      case Method::aclms:
        estimators::aclms_step(s, smp.y, smp.x, plan->threshold(q));
        break;
      case Method::acrls:
        estimators::acrls_step(s, smp.y, smp.x, plan->threshold(q));
        break;
      case Method::raclms:
      case Method::racrls: {
        const double tau = plan->threshold(q);
        const double tau_o = plan->prefactor(q) * cfg.tau_o;
        if (method == Method::raclms) {
          estimators::raclms_step(s, smp.y, smp.x, tau, tau_o);
        } else {
          estimators::racrls_step(s, smp.y, smp.x, tau, tau_o);
        }
        break;
      }
      case Method::samle1:
      case Method::samle2: {
        const double tau = plan->threshold(q);
        const double anchor = smp.x.dot(fit->theta_K);
        const CensorDecision d = censor::nac_decide(smp.y, anchor, sigma, tau);
        if (method == Method::samle1) {
          estimators::samle1_step(s, d, smp.x, tau, anchor);
        } else {
          estimators::samle2_step(s, d, smp.x, tau, anchor);
        }
        break;
      }
      default:
        break;
    }
    if (charge_threshold) s.multiplies += threshold_cost;
    if (rec.due(s.n)) {
      rec.record(s.n, s.theta, 1.0 - static_cast<double>(s.kept) / static_cast<double>(s.n),
                 s.multiplies);
    }
  }
  trace.theta = s.theta;
  trace.processed = s.n;
  trace.kept = s.kept;
}

void run_batch(const ExperimentConfig& cfg, Method method, const ReplicateData& data,
               std::uint64_t seed, TrialTrace& trace) {
  const auto p = static_cast<std::uint64_t>(data.p());
  const std::uint64_t D = data.D();
  Matrix X;
  RealVector y;
  data.rows(data.K(), D, X, y);

  if (method == Method::kaczmarz) {
    const std::uint64_t N = D * static_cast<std::uint64_t>(cfg.passes);
    Recorder rec(trace, record_points(cfg.record, N));
    const std::uint64_t per_iter = 2 * p + 1;
    trace.theta = estimators::kaczmarz_run(
        X, y, N, derive_seed(seed, 11), [&](std::uint64_t it, const RealVector& th) {
          if (rec.due(it)) rec.record(it, th, 0.0, it * per_iter);
        });
    trace.processed = N;
    trace.kept = N;
    return;
  }

  Recorder rec(trace, {D});
  std::uint64_t d = D;
  std::uint64_t mult = 0;
  if (method == Method::batch_lse) {
    trace.theta = estimators::batch_lse(X, y);
    mult = D * p * p + D * p;
  } else {
    d = std::clamp<std::uint64_t>(
        static_cast<std::uint64_t>(std::llround(cfg.ratio * static_cast<double>(D))), p, D);
    const std::uint64_t sketch_seed = derive_seed(seed, 13);
    const ReducedProblem rp = method == Method::srht ? sketch::srht_reduce(X, y, d, sketch_seed)
                                                     : sketch::uniform_reduce(X, y, d, sketch_seed);
    trace.theta = sketch::solve_reduced(rp);
    mult = d * p * p + d * p;
    if (method == Method::srht) mult += (D + d) * (p + 1);
  }
  rec.record(D, trace.theta, 1.0 - static_cast<double>(d) / static_cast<double>(D), mult);
  trace.processed = D;
  trace.kept = d;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void sort_traces(std::vector<TrialTrace>& traces) {
  std::stable_sort(traces.begin(), traces.end(), [](const TrialTrace& a, const TrialTrace& b) {
    const std::string ma = to_string(a.method), mb = to_string(b.method);
    if (ma != mb) return ma < mb;
    return a.seed < b.seed;
  });
}

Curve aggregate(Method m, const std::vector<const TrialTrace*>& traces) {
  Curve c;
  c.method = m;
  c.replicates = static_cast<int>(traces.size());
  if (traces.empty()) return c;
  const std::size_t npts = traces.front()->points.size();
  const double R = static_cast<double>(traces.size());
  for (std::size_t k = 0; k < npts; ++k) {
    CurvePoint cp;
    cp.n = traces.front()->points[k].n;
    double s_mse = 0, s_rse = 0, s_cr = 0, s_mul = 0;
    for (const TrialTrace* t : traces) {
      const TracePoint& pt = t->points.at(k);
      s_mse += pt.mse;
      s_rse += pt.rse;
      s_cr += pt.censor_ratio;
      s_mul += static_cast<double>(pt.multiplies);
    }
    cp.mean_mse = s_mse / R;
    cp.mean_rse = s_rse / R;
    cp.mean_censor_ratio = s_cr / R;
    cp.mean_multiplies = s_mul / R;
    if (traces.size() > 1) {
      double v_mse = 0, v_rse = 0;
      for (const TrialTrace* t : traces) {
        v_mse += std::pow(t->points[k].mse - cp.mean_mse, 2);
        v_rse += std::pow(t->points[k].rse - cp.mean_rse, 2);
      }
      cp.std_mse = std::sqrt(v_mse / (R - 1.0));
      cp.std_rse = std::sqrt(v_rse / (R - 1.0));
    }
    c.points.push_back(cp);
  }
  return c;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

}  // namespace

ExperimentContext prepare(const ExperimentConfig& cfg) {
  ExperimentContext ctx;
  if (cfg.synthetic) return ctx;
  auto ds = std::make_shared<Dataset>(ingest::load_csv(cfg.csv.path, cfg.csv.target, cfg.csv.options));
  ctx.truth = ingest::surrogate_truth(*ds, cfg.csv.unbiased_sigma);
  ctx.dataset = std::move(ds);
  return ctx;
}

std::vector<std::uint64_t> record_points(const std::string& record, std::uint64_t N) {
  std::vector<std::uint64_t> pts;
  if (N == 0) return pts;
  if (record == "final") {
    pts.push_back(N);
  } else if (record == "geometric") {
    for (std::uint64_t n = 1; n < N; n *= 2) pts.push_back(n);
    pts.push_back(N);
  } else if (record.rfind("every:", 0) == 0) {
    const auto k = static_cast<std::uint64_t>(std::stoll(record.substr(6)));
    if (k < 1) throw ConfigError("record", "every:N needs N >= 1");
    for (std::uint64_t n = k; n < N; n += k) pts.push_back(n);
    pts.push_back(N);
  } else {
    throw ConfigError("record", "expected geometric, final or every:N");
  }
  return pts;
}

TrialTrace run_trial(const ExperimentConfig& cfg, Method method, std::uint64_t replicate_seed,
                     const ExperimentContext& ctx) {
  const ReplicateData data(cfg, replicate_seed, ctx);
  TrialTrace trace;
  trace.method = method;
  trace.seed = replicate_seed;
  trace.theta_o = data.theta_o();
  try {
    switch (method) {
      case Method::kaczmarz:
      case Method::srht:
      case Method::uniform:
      case Method::batch_lse:
        run_batch(cfg, method, data, replicate_seed, trace);
        break;
      default:
        run_streaming(cfg, method, data, trace);
    }
  } catch (const SingularityError& e) {
    throw SingularityError(to_string(method) + " (seed " + std::to_string(replicate_seed) +
                           "): " + e.what());
  }
  return trace;
}

MonteCarloResult monte_carlo(const ExperimentConfig& cfg) {
  cfg.validate();
  const ExperimentContext ctx = prepare(cfg);
  const std::size_t R = static_cast<std::size_t>(cfg.replicates);
  const std::size_t M = cfg.methods.size();
  std::vector<TrialTrace> slots(R * M);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    while (true) {
      const std::size_t r = next.fetch_add(1);
      if (r >= R) return;
      try {
        const std::uint64_t seed = derive_seed(cfg.seed, r);
        for (std::size_t m = 0; m < M; ++m) {
          slots[r * M + m] = run_trial(cfg, cfg.methods[m], seed, ctx);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(R);
      }
    }
  };
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), R);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  MonteCarloResult res;
  res.cfg = cfg;
  for (std::size_t m = 0; m < M; ++m) {
    std::vector<const TrialTrace*> per;
    for (std::size_t r = 0; r < R; ++r) per.push_back(&slots[r * M + m]);
    res.curves.push_back(aggregate(cfg.methods[m], per));
  }
  res.traces = std::move(slots);
  sort_traces(res.traces);
  return res;
}

TheoryBounds theory_bounds(const ExperimentConfig& cfg) {
  if (!cfg.synthetic) throw ConfigError("source", "bounds need a synthetic source with known R_x");
  if (cfg.threshold.kind != "constant") {
    throw ConfigError("threshold.kind", "bounds are stated for a constant threshold");
  }
  const datagen::StreamGenerator gen(cfg.stream);
  const auto Rx = gen.design_covariance();
  if (!Rx) throw ConfigError("source.df", "design covariance does not exist (df <= 2)");
  Eigen::SelfAdjointEigenSolver<SymMatrix> eig(*Rx);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  TheoryBounds b;
  b.tau = cfg.threshold.tau;
  b.sigma = cfg.stream.sigma;
  const double Q = numkit::gauss_q(b.tau);
  b.alpha = 2.0 * Q * lmin;
  b.delta = 2.0 * Rx->trace() * b.sigma * b.sigma * (1.0 - Q + b.tau * numkit::gauss_pdf(b.tau));
  b.L2 = lmax * lmax;
  b.trace_rinv = eig.eigenvalues().cwiseInverse().sum();
  return b;
}

double regret_step(std::uint64_t D, double dist, double x_bar, double beta_bar) {
  return dist / (std::sqrt(2.0 * static_cast<double>(D)) * beta_bar * x_bar);
}

double regret_bound(std::uint64_t D, double dist, double x_bar, double beta_bar) {
  return std::sqrt(2.0 * static_cast<double>(D)) * dist * x_bar * beta_bar;
}

std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const std::string& axis,
                              const std::vector<std::string>& values) {
  if (values.empty()) throw ConfigError("values", "sweep axis is empty");
  if (axis != "tau" && axis != "ratio" && axis != "method") {
    throw ConfigError("axis", "expected tau, ratio or method; got '" + axis + "'");
  }
  std::vector<SweepPoint> out;
  for (const auto& v : values) {
    ExperimentConfig c = cfg;
    if (axis == "method") {
      c.methods = {parse_method(v)};
    } else {
      double x = 0.0;
      try {
        std::size_t used = 0;
        x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::logic_error&) {
        throw ConfigError("values", "'" + v + "' is not a number");
      }
      if (axis == "tau") {
        c.threshold.kind = "constant";
        c.threshold.tau = x;
      } else {
        c.ratio = x;
        const bool censoring = std::any_of(c.methods.begin(), c.methods.end(), [](Method m) {
          return adaptive_censoring(m) || uses_preliminary_fit(m);
        });
        if (censoring) {
          const auto& k = c.threshold.kind;
          if (k == "constant" || k == "ac-schedule") {
            throw ConfigError("threshold.kind", "a ratio sweep needs a target-based plan");
          }
          c.threshold.target = 1.0 - x;
        }
      }
    }
    c.validate();
    out.push_back({v, monte_carlo(c)});
  }
  return out;
}

std::vector<BenchRow> bench(const ExperimentConfig& cfg, int repeats) {
  cfg.validate();
  ExperimentConfig c = cfg;
  c.record = "final";
  const ExperimentContext ctx = prepare(c);
  const std::uint64_t seed = derive_seed(c.seed, 0);
  std::vector<BenchRow> rows;
  for (Method m : c.methods) {
    BenchRow row;
    row.method = m;
    row.seconds = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, repeats); ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const TrialTrace t = run_trial(c, m, seed, ctx);
      const auto t1 = std::chrono::steady_clock::now();
      row.seconds = std::min(row.seconds, std::chrono::duration<double>(t1 - t0).count());
      row.multiplies = t.points.back().multiplies;
      row.kept = t.kept;
      row.processed = t.processed;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_results_csv(const std::string& path, const std::vector<SweepPoint>& points,
                       const std::string& axis) {
  std::ofstream out = open_out(path);
  if (!axis.empty()) out << axis << ',';
  out << "method,seed,n,mse,rse,censor_ratio,multiplies\n";
  for (const auto& sp : points) {
    for (const auto& t : sp.result.traces) {
      for (const auto& pt : t.points) {
        if (!axis.empty()) out << sp.value << ',';
        out << to_string(t.method) << ',' << t.seed << ',' << pt.n << ',' << fmt(pt.mse) << ','
            << fmt(pt.rse) << ',' << fmt(pt.censor_ratio) << ',' << pt.multiplies << '\n';
      }
    }
  }
  if (!out) throw IoError("write failed for " + path);
}

void write_results_csv(const std::string& path, const MonteCarloResult& result) {
  write_results_csv(path, {{"", result}}, "");
}

void write_curves_csv(const std::string& path, const std::vector<SweepPoint>& points,
                      const std::string& axis) {
  std::ofstream out = open_out(path);
  if (!axis.empty()) out << axis << ',';
  out << "method,n,replicates,mean_mse,std_mse,mean_rse,std_rse,mean_censor_ratio,"
         "mean_multiplies\n";
  for (const auto& sp : points) {
    for (const auto& c : sp.result.curves) {
      for (const auto& pt : c.points) {
        if (!axis.empty()) out << sp.value << ',';
        out << to_string(c.method) << ',' << pt.n << ',' << c.replicates << ','
            << fmt(pt.mean_mse) << ',' << fmt(pt.std_mse) << ',' << fmt(pt.mean_rse) << ','
            << fmt(pt.std_rse) << ',' << fmt(pt.mean_censor_ratio) << ','
            << fmt(pt.mean_multiplies) << '\n';
      }
    }
  }
  if (!out) throw IoError("write failed for " + path);
}

void write_curves_csv(const std::string& path, const MonteCarloResult& result) {
  write_curves_csv(path, {{"", result}}, "");
}

nlohmann::json summary(const MonteCarloResult& result) {
  const ExperimentConfig& cfg = result.cfg;
  nlohmann::json doc;
  doc["config"] = to_json(cfg);
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& c : result.curves) {
    if (c.points.empty()) continue;
    const CurvePoint& f = c.points.back();
    methods.push_back({{"method", to_string(c.method)},
                       {"replicates", c.replicates},
                       {"n", f.n},
                       {"mean_mse", f.mean_mse},
                       {"std_mse", f.std_mse},
                       {"mean_rse", f.mean_rse},
                       {"std_rse", f.std_rse},
                       {"mean_censor_ratio", f.mean_censor_ratio},
                       {"mean_multiplies", f.mean_multiplies}});
  }
  doc["methods"] = methods;

  if (cfg.synthetic) {
    const int Rf = std::min(cfg.replicates, 10);
    const double work = static_cast<double>(cfg.stream.D) * cfg.stream.p * cfg.stream.p * Rf;
    nlohmann::json floor = {{"label", "full-data LSE MSE (reference floor, not a CRLB)"},
                            {"replicates", Rf}};
    if (work <= 5e8) {
      StreamSpec spec = cfg.stream;
      spec.seed = derive_seed(cfg.seed, 0xF1002);
      floor["mse"] = datagen::full_lse_mse(spec, Rf);
    } else {
      floor["skipped"] = "exceeds the summary compute budget";
    }
    doc["floor"] = floor;
    if (cfg.threshold.kind == "constant") {
      try {
        const TheoryBounds b = theory_bounds(cfg);
        const std::uint64_t n = cfg.stream.D * static_cast<std::uint64_t>(cfg.passes);
        doc["bounds"] = {{"tau", b.tau},
                         {"alpha", b.alpha},
                         {"delta", b.delta},
                         {"L2", b.L2},
                         {"n", n},
                         {"acrls_mse_lower", b.acrls_mse_lower(n)},
                         {"acrls_mse_upper", b.acrls_mse_upper(n)}};
      } catch (const ConfigError&) {
        // heavy-tailed design without a covariance; no bounds to report
      }
    }
  }
  return doc;
}

}  // namespace harness
}  // namespace cendre
