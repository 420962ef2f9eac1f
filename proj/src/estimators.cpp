#include "cendre/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cendre/errors.hpp"
#include "cendre/rng.hpp"

namespace cendre {

double StepSize::at(std::uint64_t n) const {
  if (kind == Kind::constant) return mu;
  return mu / (static_cast<double>(n) + offset);
}

SymMatrix EstimatorState::step_matrix() const {
  if (!second_order()) return {};
  return n == 0 ? P : SymMatrix(static_cast<double>(n) * P);
}

namespace estimators {

namespace {

using Count = std::uint64_t;

Count p_of(const EstimatorState& s) { return static_cast<Count>(s.theta.size()); }

void check_dims(const EstimatorState& s, const RealVector& x) {
  if (x.size() != s.theta.size()) {
    throw DomainError("estimator step: regressor has dimension " + std::to_string(x.size()) +
                      ", estimate has " + std::to_string(s.theta.size()));
  }
}

void require_second_order(const EstimatorState& s, const char* who) {
  if (!s.second_order()) {
    throw UsageError(std::string(who) + ": state carries no inverse-information matrix");
  }
}

// theta += P_new x * e with the usual rank-one update of P.
void rls_correction(EstimatorState& s, const RealVector& x, double e) {
  const RealVector gain = numkit::rank_one_inverse_update_in_place(s.P, x, 1.0);
  s.theta.noalias() += gain * e;
  const Count p = p_of(s);
  s.multiplies += 2 * p * p + 3 * p;
}

void lms_correction(EstimatorState& s, const RealVector& x, double e, double mu) {
  s.theta.noalias() += (mu * e) * x;
  s.multiplies += p_of(s) + 1;
}

double innovation(EstimatorState& s, double y, const RealVector& x) {
  check_dims(s, x);
  if (!std::isfinite(y)) throw DomainError("estimator step: non-finite observation");
  s.multiplies += p_of(s);
  return y - x.dot(s.theta);
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

CensorDecision threshold_decision(double y, double e, double sigma, double tau) {
  if (!(tau >= 0.0)) throw DomainError("censoring threshold must be non-negative");
  CensorDecision d;
  d.kept = std::abs(e) >= tau * sigma;
  if (d.kept) d.value = y;
  return d;
}

}  // namespace

PreliminaryFit preliminary_fit(const Matrix& X_K, const RealVector& y_K) {
  if (X_K.rows() != y_K.size()) throw DomainError("preliminary_fit: row count mismatch");
  if (X_K.rows() < X_K.cols()) {
    throw SingularityError("preliminary_fit: need K >= p rows, got K=" +
                           std::to_string(X_K.rows()) + ", p=" + std::to_string(X_K.cols()));
  }
  const SymMatrix gram = X_K.transpose() * X_K;
  Eigen::LLT<SymMatrix> llt(gram);
  const auto diag = llt.matrixLLT().diagonal();
  if (llt.info() != Eigen::Success || diag.minCoeff() <= 1e-7 * diag.maxCoeff()) {
    throw SingularityError("preliminary_fit: X_K is rank deficient");
  }
  PreliminaryFit fit;
  fit.K = static_cast<int>(X_K.rows());
  fit.gram_inv = llt.solve(SymMatrix::Identity(gram.rows(), gram.cols()));
  fit.gram_inv = 0.5 * (fit.gram_inv + fit.gram_inv.transpose()).eval();
  fit.theta_K = llt.solve(X_K.transpose() * y_K);
  return fit;
}

EstimatorState init_first_order(RealVector theta0, StepSize step, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("estimator: sigma must be finite and non-negative");
  EstimatorState s;
  s.theta = std::move(theta0);
  s.step = step;
  s.sigma = sigma;
  return s;
}

EstimatorState init_samle2(const PreliminaryFit& fit, double sigma) {
  EstimatorState s = init_first_order(fit.theta_K, StepSize::constant(1.0), sigma);
  s.P = sigma * sigma * fit.gram_inv;
  return s;
}

EstimatorState init_rls(int p, double eps, double sigma) {
  if (!(eps > 0.0)) throw DomainError("init_rls: eps must be positive");
  EstimatorState s = init_first_order(RealVector::Zero(p), StepSize::constant(1.0), sigma);
  s.P = SymMatrix::Identity(p, p) / eps;
  return s;
}

double default_rls_epsilon(const RealVector& x_first) {
  const double scale = x_first.squaredNorm() / static_cast<double>(x_first.size());
  return 1e-2 * (scale > 0.0 ? scale : 1.0);
}

void samle1_step(EstimatorState& s, const CensorDecision& d, const RealVector& x, double tau,
                 double anchor) {
  check_dims(s, x);
  const std::uint64_t n = s.n + 1;
  const double pred = x.dot(s.theta);
  s.multiplies += p_of(s);
  const ScoreInfo si = d.kept ? likelihood::evaluate_at(false, d.value.value(), pred, tau, s.sigma)
                              : likelihood::evaluate_at(true, anchor, pred, tau, s.sigma);
  lms_correction(s, x, si.beta, s.step.at(n));
  s.n = n;
  if (d.kept) ++s.kept;
}

void samle2_step(EstimatorState& s, const CensorDecision& d, const RealVector& x, double tau,
                 double anchor) {
  check_dims(s, x);
  require_second_order(s, "samle2_step");
  const double pred = x.dot(s.theta);
  const ScoreInfo si = d.kept ? likelihood::evaluate_at(false, d.value.value(), pred, tau, s.sigma)
                              : likelihood::evaluate_at(true, anchor, pred, tau, s.sigma);
  const Count p = p_of(s);
  RealVector gain = si.info > 0.0 ? numkit::rank_one_inverse_update_in_place(s.P, x, si.info)
                                  : RealVector(s.P * x);
  s.theta.noalias() += gain * si.beta;
  s.multiplies += p + 2 * p * p + 4 * p + 1;
  ++s.n;
  if (d.kept) ++s.kept;
}

void lms_step(EstimatorState& s, double y, const RealVector& x) {
  const double e = innovation(s, y, x);
  ++s.n;
  lms_correction(s, x, e, s.step.at(s.n));
  ++s.kept;
}

void rls_step(EstimatorState& s, double y, const RealVector& x) {
  require_second_order(s, "rls_step");
  const double e = innovation(s, y, x);
  ++s.n;
  rls_correction(s, x, e);
  ++s.kept;
}

CensorDecision aclms_step(EstimatorState& s, double y, const RealVector& x, double tau) {
  const double e = innovation(s, y, x);
  ++s.n;
  const CensorDecision d = threshold_decision(y, e, s.sigma, tau);
  if (d.kept) {
    lms_correction(s, x, e, s.step.at(s.n));
    ++s.kept;
  }
  return d;
}

CensorDecision acrls_step(EstimatorState& s, double y, const RealVector& x, double tau) {
  require_second_order(s, "acrls_step");
  const double e = innovation(s, y, x);
  ++s.n;
  const CensorDecision d = threshold_decision(y, e, s.sigma, tau);
  if (d.kept) {
    rls_correction(s, x, e);
    ++s.kept;
  }
  return d;
}

CensorDecision raclms_step(EstimatorState& s, double y, const RealVector& x, double tau,
                           double tau_o) {
  const double e = innovation(s, y, x);
  ++s.n;
  CensorDecision d = censor::robust_decide(e, s.sigma, tau, tau_o);
  if (!d.kept) return d;
  d.value = y;
  const double mu = s.step.at(s.n);
  if (d.outlier) {
    lms_correction(s, x, tau_o * s.sigma * sign(e), mu);
    s.multiplies += 1;
  } else {
    lms_correction(s, x, e, mu);
  }
  ++s.kept;
  return d;
}

CensorDecision racrls_step(EstimatorState& s, double y, const RealVector& x, double tau,
                           double tau_o) {
  require_second_order(s, "racrls_step");
  const double e = innovation(s, y, x);
  ++s.n;
  CensorDecision d = censor::robust_decide(e, s.sigma, tau, tau_o);
  if (!d.kept) return d;
  d.value = y;
  if (d.outlier) {
    // Clipped correction along the gain P x / (1 + x'Px); P itself is left
    // alone so no rank-one update is paid for an outlier.
    const RealVector k = s.P * x;
    const double denom = 1.0 + x.dot(k);
    s.theta.noalias() += k * (tau_o * s.sigma * sign(e) / denom);
    const Count p = p_of(s);
    s.multiplies += p * p + 3 * p;
  } else {
    rls_correction(s, x, e);
  }
  ++s.kept;
  return d;
}

RealVector kaczmarz_probabilities(const Matrix& X) {
  RealVector norms = X.rowwise().squaredNorm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (!(norms[i] > 0.0)) {
      throw DomainError("kaczmarz: row " + std::to_string(i) + " is zero");
    }
  }
  return norms / norms.sum();
}

RealVector kaczmarz_run(const Matrix& X, const RealVector& y, std::uint64_t iters,
                        std::uint64_t seed,
                        const std::function<void(std::uint64_t, const RealVector&)>& observer) {
  if (X.rows() != y.size()) throw DomainError("kaczmarz: row count mismatch");
  const RealVector norms = X.rowwise().squaredNorm();
  const RealVector prob = kaczmarz_probabilities(X);
  std::vector<double> cumulative(static_cast<std::size_t>(prob.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < prob.size(); ++i) {
    acc += prob[i];
    cumulative[static_cast<std::size_t>(i)] = acc;
  }
  Rng rng(seed);
  RealVector theta = RealVector::Zero(X.cols());
  for (std::uint64_t it = 1; it <= iters; ++it) {
    const double u = rng.uniform() * acc;
    auto pos = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const Eigen::Index i = std::min<Eigen::Index>(pos - cumulative.begin(), X.rows() - 1);
    const double r = y[i] - X.row(i).dot(theta);
    theta.noalias() += (r / norms[i]) * X.row(i).transpose();
    if (observer) observer(it, theta);
  }
  return theta;
}

RealVector batch_lse(const Matrix& X, const RealVector& y) {
  if (X.rows() != y.size()) throw DomainError("batch_lse: row count mismatch");
  if (X.rows() < X.cols()) throw SingularityError("batch_lse: fewer rows than unknowns");
  const SymMatrix gram = X.transpose() * X;
  return numkit::cholesky_solve(gram, X.transpose() * y);
}

double regret(const std::vector<RealVector>& traj, const std::vector<CensoredTerm>& terms,
              const RealVector& theta_ref) {
  if (traj.size() != terms.size()) throw DomainError("regret: trajectory/term length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    total += likelihood::loss(terms[i], traj[i]) - likelihood::loss(terms[i], theta_ref);
  }
  return total;
}

nlohmann::json snapshot(const EstimatorState& s) {
  nlohmann::json doc;
  doc["theta"] = std::vector<double>(s.theta.data(), s.theta.data() + s.theta.size());
  if (s.second_order()) {
    std::vector<double> rows;
    rows.reserve(static_cast<std::size_t>(s.P.size()));
    for (Eigen::Index i = 0; i < s.P.rows(); ++i)
      for (Eigen::Index j = 0; j < s.P.cols(); ++j) rows.push_back(s.P(i, j));
    doc["P"] = rows;
  }
  doc["n"] = s.n;
  doc["kept"] = s.kept;
  doc["multiplies"] = s.multiplies;
  doc["sigma"] = s.sigma;
  doc["step_kind"] = s.step.kind == StepSize::Kind::constant ? "constant" : "diminishing";
  doc["step_mu"] = s.step.mu;
  doc["step_offset"] = s.step.offset;
  return doc;
}

EstimatorState restore(const nlohmann::json& doc) {
  EstimatorState s;
  const auto theta = doc.at("theta").get<std::vector<double>>();
  s.theta = Eigen::Map<const RealVector>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  if (doc.contains("P")) {
    const auto rows = doc.at("P").get<std::vector<double>>();
    const auto p = static_cast<Eigen::Index>(theta.size());
    if (static_cast<Eigen::Index>(rows.size()) != p * p) {
      throw DomainError("restore: P has " + std::to_string(rows.size()) + " entries");
    }
    s.P.resize(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < p; ++j) s.P(i, j) = rows[static_cast<std::size_t>(i * p + j)];
  }
  s.n = doc.at("n").get<std::uint64_t>();
  s.kept = doc.at("kept").get<std::uint64_t>();
  s.multiplies = doc.at("multiplies").get<std::uint64_t>();
  s.sigma = doc.at("sigma").get<double>();
  s.step.kind = doc.at("step_kind").get<std::string>() == "constant" ? StepSize::Kind::constant
                                                                      : StepSize::Kind::diminishing;
  s.step.mu = doc.at("step_mu").get<double>();
  s.step.offset = doc.at("step_offset").get<double>();
  return s;
}

}  // namespace estimators
}  // namespace cendre
