#include "ctmc/transient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

#include "ctmc/errors.hpp"
#include "ctmc/matrices.hpp"
#include "ctmc/model_io.hpp"

namespace ctmc {

namespace {

constexpr double kDriftLimit = 1e-12;

using ErrorNorm =
    std::function<double(const Eigen::MatrixXd& err, const Eigen::MatrixXd& y0, const Eigen::MatrixXd& y1)>;

struct IntegratorConfig {
  double tol;
  bool implicit;
  double fixed_step;
  double max_step;
  long max_steps;
};

struct Run {
  std::vector<Eigen::MatrixXd> values;
  std::vector<Eigen::MatrixXd> derivatives;
  std::vector<Renormalization> renormalizations;
  long steps = 0;
  long rejected = 0;
};

// Clips and renormalizes the first `prob_cols` columns when their drift from
// a probability vector exceeds the limit.
bool renormalize(Eigen::MatrixXd& y, int prob_cols, double t, std::vector<Renormalization>& log) {
  bool changed = false;
  for (int c = 0; c < prob_cols; ++c) {
    auto col = y.col(c);
    const double drift = std::max(std::abs(col.sum() - 1.0), std::max(0.0, -col.minCoeff()));
    if (drift > kDriftLimit) {
      col = col.cwiseMax(0.0);
      col /= col.sum();
      log.push_back({t, drift});
      changed = true;
    }
  }
  return changed;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

Run integrate_dp45(const MatrixFunction& A, Eigen::MatrixXd y, const std::vector<double>& times, int prob_cols,
                   const IntegratorConfig& cfg, const ErrorNorm& norm) {
  Run run;
  double t = times.front();
  Eigen::MatrixXd k1 = A(t) * y;
  run.values.push_back(y);
  run.derivatives.push_back(k1);

  const double a_norm = A(t).cwiseAbs().colwise().sum().maxCoeff();
  double h = std::min(cfg.max_step, 0.5 * std::pow(cfg.tol, 0.2) / std::max(1.0, a_norm));
  bool last_rejected = false;

  for (std::size_t idx = 1; idx < times.size(); ++idx) {
    const double target = times[idx];
    while (t < target) {
      double hh = std::min(h, target - t);
      const bool land = hh >= target - t;
      const Eigen::MatrixXd k2 = A(t + c2 * hh) * (y + hh * a21 * k1);
      const Eigen::MatrixXd k3 = A(t + c3 * hh) * (y + hh * (a31 * k1 + a32 * k2));
      const Eigen::MatrixXd k4 = A(t + c4 * hh) * (y + hh * (a41 * k1 + a42 * k2 + a43 * k3));
      const Eigen::MatrixXd k5 = A(t + c5 * hh) * (y + hh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Eigen::MatrixXd k6 =
          A(t + hh) * (y + hh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      Eigen::MatrixXd y_new = y + hh * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const double t_new = land ? target : t + hh;
      Eigen::MatrixXd k7 = A(t_new) * y_new;
      const Eigen::MatrixXd err = hh * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = norm(err, y, y_new);
      if (!std::isfinite(en)) {
        std::ostringstream os;
        os << "non-finite error estimate at t=" << t << " (h=" << hh << ")";
        throw NumericError(os.str());
      }

      if (en <= 1.0) {
        t = t_new;
        y = std::move(y_new);
        if (renormalize(y, prob_cols, t, run.renormalizations)) k7 = A(t) * y;
        k1 = std::move(k7);
        ++run.steps;
        double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (last_rejected) factor = std::min(factor, 1.0);
        const double h_next = hh * factor;
        h = (land && hh < h) ? std::max(h, h_next) : h_next;
        last_rejected = false;
      } else {
        ++run.rejected;
        h = hh * std::max(0.2, 0.9 * std::pow(en, -0.2));
        last_rejected = true;
      }
      h = std::min(h, cfg.max_step);
      if (h < 1e-14 * std::max(1.0, std::abs(t))) {
        std::ostringstream os;
        os << "step size underflow at t=" << t << " (h=" << h << ", error ratio " << en << ")";
        throw NumericError(os.str());
      }
      if (run.steps + run.rejected > cfg.max_steps) {
        throw NumericError("step limit of " + std::to_string(cfg.max_steps) + " exceeded at t=" +
                           std::to_string(t));
      }
    }
    run.values.push_back(y);
    run.derivatives.push_back(k1);
  }
  return run;
}

Run integrate_midpoint(const MatrixFunction& A, Eigen::MatrixXd y, const std::vector<double>& times, int prob_cols,
                       const IntegratorConfig& cfg) {
  if (!(cfg.fixed_step > 0.0)) throw ModelError("fixed step must be positive");
  Run run;
  const Eigen::Index n = y.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  double t = times.front();
  run.values.push_back(y);
  run.derivatives.push_back(A(t) * y);
  for (std::size_t idx = 1; idx < times.size(); ++idx) {
    const double target = times[idx];
    while (t < target) {
      const double hh = std::min(cfg.fixed_step, target - t);
      const Eigen::MatrixXd am = A(t + 0.5 * hh);
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(I - 0.5 * hh * am);
      y = lu.solve(y + 0.5 * hh * (am * y));
      t = hh >= target - t ? target : t + hh;
      renormalize(y, prob_cols, t, run.renormalizations);
      if (!y.allFinite()) throw NumericError("implicit midpoint produced non-finite values at t=" + std::to_string(t));
      if (++run.steps > cfg.max_steps) throw NumericError("step limit exceeded");
    }
    run.values.push_back(y);
    run.derivatives.push_back(A(t) * y);
  }
  return run;
}

Run integrate(const MatrixFunction& A, Eigen::MatrixXd y, const std::vector<double>& times, int prob_cols,
              const IntegratorConfig& cfg, const ErrorNorm& norm) {
  if (cfg.implicit) return integrate_midpoint(A, std::move(y), times, prob_cols, cfg);
  return integrate_dp45(A, std::move(y), times, prob_cols, cfg, norm);
}

double probability_error(const Eigen::MatrixXd& err, const Eigen::MatrixXd& y0, const Eigen::MatrixXd& y1,
                         int cols, double tol) {
  double worst = 0.0;
  for (int c = 0; c < cols; ++c) {
    const Eigen::ArrayXd scale = tol * (1.0 + y0.col(c).array().abs().max(y1.col(c).array().abs()));
    worst = std::max(worst, (err.col(c).array().abs() / scale).maxCoeff());
  }
  return worst;
}

void require_distribution(const Eigen::VectorXd& p, int S, const char* what) {
  if (p.size() != S + 1) throw ModelError(std::string(what) + " must have S+1 entries");
  if (!p.allFinite() || p.minCoeff() < -1e-12 || std::abs(p.sum() - 1.0) > 1e-10) {
    throw ModelError(std::string(what) + " is not a probability vector");
  }
}

// (T y)_k = sum_{i >= k} y_i.
Eigen::VectorXd apply_T(const Eigen::VectorXd& y) {
  Eigen::VectorXd x(y.size());
  double acc = 0.0;
  for (Eigen::Index k = y.size() - 1; k >= 0; --k) {
    acc += y[k];
    x[k] = acc;
  }
  return x;
}

double log_sum_exp(const std::vector<double>& xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace

Eigen::VectorXd Trajectory::at(double t) const {
  if (times.empty()) throw ModelError("empty trajectory");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
  const double h = times[i + 1] - times[i];
  const double s = (t - times[i]) / h;
  const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
  const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
  return h00 * states[i] + h10 * h * derivatives[i] + h01 * states[i + 1] + h11 * h * derivatives[i + 1];
}

Eigen::VectorXd point_mass(int S, int k) {
  if (k < 0 || k > S) throw ModelError("initial state " + std::to_string(k) + " outside 0.." + std::to_string(S));
  Eigen::VectorXd p = Eigen::VectorXd::Zero(S + 1);
  p[k] = 1.0;
  return p;
}

Eigen::VectorXd uniform_distribution(int S) { return Eigen::VectorXd::Constant(S + 1, 1.0 / (S + 1)); }

Eigen::VectorXd parse_initial(const std::string& spec, int S) {
  if (spec == "uniform") return uniform_distribution(S);
  std::size_t pos = 0;
  int k = 0;
  try {
    k = std::stoi(spec, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != spec.size()) throw ModelError("initial must be a state index or 'uniform', got '" + spec + "'");
  return point_mass(S, k);
}

std::vector<double> output_times(double t0, double t1, double step) {
  if (!(t1 > t0)) throw ModelError("horizon must be increasing");
  if (!(step > 0.0)) throw ModelError("output step must be positive");
  const long n = static_cast<long>(std::ceil((t1 - t0) / step - 1e-9));
  std::vector<double> ts;
  ts.reserve(n + 1);
  for (long k = 0; k < n; ++k) ts.push_back(t0 + k * step);
  ts.push_back(t1);
  return ts;
}

Trajectory solve_kolmogorov(const ChainModel& model, const Eigen::VectorXd& p0, double t0, double t1,
                            const SolverOptions& opts) {
  require_valid(model);
  require_distribution(p0, model.S, "initial distribution");
  if (!(opts.tol > 0.0)) throw ModelError("tolerance must be positive");
  const MatrixFunction A = build_A(model);
  const std::vector<double> ts = output_times(t0, t1, opts.output_step);

  const IntegratorConfig cfg{opts.tol, opts.implicit_midpoint, opts.fixed_step, opts.max_step, opts.max_steps};
  const double tol = opts.tol;
  Run run = integrate(A, p0, ts, 1, cfg, [tol](const auto& e, const auto& y0, const auto& y1) {
    return probability_error(e, y0, y1, 1, tol);
  });

  Trajectory traj;
  traj.times = ts;
  for (auto& v : run.values) traj.states.push_back(v.col(0));
  for (auto& v : run.derivatives) traj.derivatives.push_back(v.col(0));
  for (int k = 0; k <= model.S; ++k) {
    if (p0[k] == 1.0) traj.initial_state = k;
  }
  traj.solver_tolerance = opts.tol;
  traj.steps = run.steps;
  traj.rejected = run.rejected;
  traj.renormalizations = std::move(run.renormalizations);
  return traj;
}

std::vector<double> expected_value(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const auto& p : traj.states) {
    double e = 0.0;
    for (Eigen::Index k = 1; k < p.size(); ++k) e += static_cast<double>(k) * p[k];
    out.push_back(e);
  }
  return out;
}

void check_applicable(const ChainModel& model, const BoundCertificate& cert) {
  require_valid(model);
  if (cert.model_fingerprint != model_fingerprint(model)) {
    throw Refusal("certificate was issued for a different model (fingerprint " + cert.model_fingerprint +
                  ", model " + model_fingerprint(model) + ")");
  }
  if (cert.weights.size() != model.S) throw Refusal("certificate weights do not match S");
  if (!(cert.constant >= 1.0)) throw Refusal("certificate constant below 1");
  switch (cert.method) {
    case Method::LogNorm:
      if (cert.weights.is_signed()) throw Refusal("logarithmic-norm certificate with signed weights");
      if (cert.norm != Norm::L1) throw Refusal("logarithmic-norm certificates use the l1 norm");
      if (auto v = find_negative_offdiagonal(build_Bstar(model))) {
        throw Refusal("B* is not essentially nonnegative at t=" + std::to_string(v->t));
      }
      break;
    case Method::Lyapunov:
      if (cert.weights.is_signed()) throw Refusal("Lyapunov certificate with signed weights");
      if (cert.norm != Norm::L2) throw Refusal("Lyapunov certificates use the l2 norm");
      break;
    case Method::DiffIneq:
      if (cert.norm != Norm::L1) throw Refusal("differential-inequality certificates use the l1 norm");
      if (!(cert.weights == WeightVector::unit(model.S))) {
        throw Refusal("differential-inequality certificates bound the plain norm of T y");
      }
      break;
  }
}

double log_weighted_norm(const BoundCertificate& cert, const Eigen::VectorXd& y) {
  const Eigen::VectorXd x = apply_T(y);
  std::vector<double> terms;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x[k] == 0.0) continue;
    const double l = std::log(std::abs(x[k])) + cert.weights.log_abs(static_cast<int>(k));
    terms.push_back(cert.norm == Norm::L1 ? l : 2.0 * l);
  }
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double s = log_sum_exp(terms);
  return cert.norm == Norm::L1 ? s : 0.5 * s;
}

double log_worst_gap(const BoundCertificate& cert) {
  std::vector<double> terms = cert.weights.log_abs_values();
  if (cert.norm == Norm::L1) return log_sum_exp(terms);
  for (double& t : terms) t *= 2.0;
  return 0.5 * log_sum_exp(terms);
}

ConvergenceReport validate_certificate(const ChainModel& model, const BoundCertificate& cert,
                                       const Eigen::VectorXd& p0a, const Eigen::VectorXd& p0b, double t0,
                                       double t1, const ValidateOptions& opts) {
  check_applicable(model, cert);
  require_distribution(p0a, model.S, "first initial distribution");
  require_distribution(p0b, model.S, "second initial distribution");
  if (opts.points < 2) throw ModelError("need at least two reported times");
  const int S = model.S;

  const MatrixFunction A = build_A(model);
  const std::vector<double> ts = output_times(t0, t1, (t1 - t0) / (opts.points - 1));

  Eigen::MatrixXd y0(S + 1, 3);
  y0.col(0) = p0a;
  y0.col(1) = p0b;
  y0.col(2) = p0a - p0b;

  // Difference column: error measured in the certificate's weights, relative
  // to the current size of the weighted difference.
  Eigen::VectorXd dhat(S);
  double max_log = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < S; ++i) max_log = std::max(max_log, cert.weights.log_abs(i));
  for (int i = 0; i < S; ++i) dhat[i] = std::exp(cert.weights.log_abs(i) - max_log);
  const double tol = opts.tol;
  auto weighted = [&](const Eigen::VectorXd& v) { return dhat.cwiseProduct(apply_T(v.tail(S))).cwiseAbs().maxCoeff(); };
  ErrorNorm norm = [&](const Eigen::MatrixXd& e, const Eigen::MatrixXd& ya, const Eigen::MatrixXd& yb) {
    const double pe = probability_error(e, ya, yb, 2, tol);
    const double size = std::max(weighted(ya.col(2)), weighted(yb.col(2)));
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * ya.col(2).cwiseAbs().maxCoeff();
    const double de = weighted(e.col(2)) / (tol * size + floor + std::numeric_limits<double>::min());
    return std::max(pe, de);
  };
  const IntegratorConfig cfg{opts.tol, opts.implicit_midpoint, opts.fixed_step,
                             std::numeric_limits<double>::infinity(), 50'000'000};
  const Run run = integrate(A, y0, ts, 2, cfg, norm);

  ConvergenceReport rep;
  rep.certificate = cert;
  rep.delta = opts.delta;
  rep.slack = opts.slack;
  for (const auto& v : run.values) {
    rep.difference_drift = std::max(rep.difference_drift, (v.col(2) - (v.col(0) - v.col(1))).cwiseAbs().maxCoeff());
  }

  std::size_t s_idx = 0;
  while (s_idx < ts.size() && ts[s_idx] < cert.valid_from - 1e-12) ++s_idx;
  if (s_idx == ts.size()) throw ModelError("horizon ends before the certificate's valid_from");
  const double log_ws = log_weighted_norm(cert, run.values[s_idx].col(2).tail(S));
  if (!std::isfinite(log_ws)) throw ModelError("the two solutions coincide at the start of the comparison");

  const double log_floor = std::log(opts.min_envelope);
  rep.max_violation = 0.0;
  rep.min_ratio = 1.0;
  for (std::size_t i = s_idx; i < ts.size(); ++i) {
    const double env = cert.log_envelope(ts[s_idx], ts[i]);
    if (env < log_floor) break;
    const double obs = log_weighted_norm(cert, run.values[i].col(2).tail(S)) - log_ws;
    const double ratio = std::exp(obs - env);
    rep.times.push_back(ts[i]);
    rep.log_observed_ratio.push_back(obs);
    rep.log_envelope.push_back(env);
    rep.max_violation = std::max(rep.max_violation, ratio - 1.0);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.resolved_until = ts[i];
  }
  rep.passed = rep.max_violation <= opts.slack;
  try {
    rep.t_star = find_tstar_log(cert, log_ws, std::log(opts.delta));
  } catch (const Refusal&) {
    rep.t_star = std::numeric_limits<double>::infinity();
  }
  return rep;
}

double find_tstar_log(const BoundCertificate& cert, double log_initial_gap, double log_delta) {
  const double mean = cert.rate.mean();
  if (!(mean > 0.0)) throw Refusal("certificate rate has non-positive mean; no finite t*");
  const double s = cert.valid_from;
  const double L = std::log(cert.constant) + log_initial_gap - log_delta;
  if (cert.rate.is_constant()) return s + std::max(0.0, L) / mean;

  // J(t) = min_{tau >= t} int_s^tau rate is nondecreasing; one period suffices
  // because the integral gains the (positive) mean every period.
  const PeriodGrid grid;
  auto J = [&](double t) {
    double m = cert.rate.integral(s, t);
    for (int k = 1; k < grid.points; ++k) m = std::min(m, cert.rate.integral(s, t + grid.node(k)));
    return m;
  };
  if (J(s) >= L) return s;
  double lo = s;
  double hi = s + std::max(0.0, L) / mean + 1.0;
  while (J(hi) < L) {
    lo = hi;
    hi += std::max(1.0, (L - J(hi)) / mean);
  }
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (J(mid) >= L ? hi : lo) = mid;
  }
  return hi;
}

double find_tstar(const BoundCertificate& cert, double initial_gap, double delta) {
  if (!(initial_gap > 0.0) || !(delta > 0.0)) throw ModelError("initial gap and delta must be positive");
  return find_tstar_log(cert, std::log(initial_gap), std::log(delta));
}

LimitingRegime limiting_regime(const ChainModel& model, const BoundCertificate& cert, double delta,
                               const SolverOptions& opts) {
  check_applicable(model, cert);
  if (!(delta > 0.0)) throw ModelError("delta must be positive");
  LimitingRegime out;
  out.t_star = find_tstar_log(cert, log_worst_gap(cert), std::log(delta));
  Eigen::VectorXd p = point_mass(model.S, 0);
  if (out.t_star > 0.0) {
    SolverOptions to_star = opts;
    to_star.output_step = out.t_star;
    p = solve_kolmogorov(model, p, 0.0, out.t_star, to_star).states.back();
    p = p.cwiseMax(0.0);
    p /= p.sum();
  }
  out.period = solve_kolmogorov(model, p, out.t_star, out.t_star + 1.0, opts);
  out.period.initial_state = 0;
  return out;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  out << buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const int S = traj.S();
  out << "t";
  for (int k = 0; k <= S; ++k) out << ",p_" << k;
  out << ",E[X]\n";
  const std::vector<double> ex = expected_value(traj);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    put(out, traj.times[i]);
    for (int k = 0; k <= S; ++k) {
      out << ',';
      put(out, traj.states[i][k]);
    }
    out << ',';
    put(out, ex[i]);
    out << '\n';
  }
}

void write_reduced_csv(const Trajectory& traj, const std::vector<int>& states, std::ostream& out) {
  const int S = traj.S();
  for (int k : states) {
    if (k < 0 || k > S) throw ModelError("state " + std::to_string(k) + " outside 0.." + std::to_string(S));
  }
  out << "t,E[X]";
  for (int k : states) out << ",p_" << k;
  out << '\n';
  const std::vector<double> ex = expected_value(traj);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    put(out, traj.times[i]);
    out << ',';
    put(out, ex[i]);
    for (int k : states) {
      out << ',';
      put(out, traj.states[i][k]);
    }
    out << '\n';
  }
}

}  // namespace ctmc
