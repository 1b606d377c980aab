// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "oracles.hpp"

#include "ctmc/certificate.hpp"
#include "ctmc/diffineq.hpp"
#include "ctmc/lognorm.hpp"
#include "ctmc/lyapunov.hpp"
#include "ctmc/matrices.hpp"
#include "ctmc/reference_models.hpp"
#include "ctmc/transient.hpp"

using namespace ctmc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail += (detail.empty() ? "" : "; ") + std::string(ok ? "" : "FAILED ") + what;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int failures = 0;

template <class F>
void criterion(int n, const char* title, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("CRITERION %d %s: %s (%.1fs)\n    %s\n", n, o.pass ? "PASS" : "FAIL", title, secs, o.detail.c_str());
  std::fflush(stdout);
}

RateFunction trig(double c, double s, double k) {
  RateFunction f(c);
  f.add_harmonic(1, s, k);
  return f;
}

// Max |p.sum() - 1| over a trajectory.
double mass_drift(const Trajectory& tr) {
  double worst = 0.0;
  for (const auto& p : tr.states) worst = std::max(worst, std::abs(p.sum() - 1.0));
  return worst;
}

void decay_parameter_sharpness(Outcome& o) {
  std::mt19937 rng(20240101);
  std::uniform_int_distribution<int> size(2, 10);
  double eig_err = 0.0, col_spread = 0.0, tight_err = 0.0, violation = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int S = size(rng);
    const ChainModel m = oracle::random_birth_death(rng, S);
    const Eigen::MatrixXd B = oracle::bstar_closed_form(m, 0.0);
    const DecayWeights w = decay_parameter_weights(B);
    eig_err = std::max(eig_err, std::abs(w.alpha_star - oracle::decay_from_eig(B)));
    const Eigen::MatrixXd D = Eigen::Map<const Eigen::VectorXd>(w.weights.values().data(), S).asDiagonal();
    const Eigen::VectorXd cols = (D * B * D.inverse()).colwise().sum().transpose();
    col_spread = std::max(col_spread, cols.maxCoeff() - cols.minCoeff());

    // delta_S against delta_0 gives w(0) = D (1, ..., 1) > 0.
    const BoundCertificate c = decay_parameter_bound(m);
    ValidateOptions vo;
    vo.tol = 1e-12;
    vo.points = 201;
    const double horizon = std::min(5.0, 3.0 / w.alpha_star);
    const ConvergenceReport r = validate_certificate(m, c, point_mass(S, S), point_mass(S, 0), 0.0, horizon, vo);
    tight_err = std::max(tight_err, std::abs(r.min_ratio - 1.0));
    violation = std::max(violation, r.max_violation);
  }
  o.require(eig_err <= 1e-8, "alpha* vs -max Re eig(B*): max err " + num(eig_err) + " <= 1e-8");
  o.require(col_spread <= 1e-9, "weighted column-sum spread " + num(col_spread) + " <= 1e-9");
  o.require(tight_err <= 1e-6 && violation <= 1e-6,
            "two-trajectory bound tight: max |observed/envelope - 1| " + num(std::max(tight_err, violation)) +
                " <= 1e-6");
}

void squares_oracle(Outcome& o) {
  std::mt19937 rng(20240202);
  std::uniform_int_distribution<int> size(2, 10);
  double err = 0.0, residual = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ChainModel m = oracle::random_birth_death(rng, size(rng));
    const Eigen::MatrixXd Bss = weight_conjugate(build_Bstar(m), symmetrize_bd(m))(0.0);
    const SquaresDecomposition dec = beta_star_squares(Bss);
    err = std::max(err, std::abs(dec.beta_star - oracle::min_sym_eig(Bss)));
    residual = std::max(residual, squares_residual(Bss, dec));
  }
  o.require(err <= 1e-8, "beta* vs lambda_min(-B**): max err " + num(err) + " <= 1e-8");
  o.require(residual <= 1e-9, "sum-of-squares reconstruction residual " + num(residual) + " <= 1e-9");
}

void batch_arrival_closed_form(Outcome& o) {
  const ChainModel m = pure_batch_arrival_chain(1.0, {1.0, 2.0, 3.0});
  const BoundCertificate c = batch_arrival_bound(m);
  o.require(std::abs(c.rate.mean() - 3.0) <= 1e-12, "beta* = " + num(c.rate.mean()) + " (expected 3)");
  const Eigen::MatrixXd Bss = weight_conjugate(build_Bstar(m), c.weights)(0.0);
  const double eig = oracle::min_sym_eig(Bss);
  o.require(std::abs(eig - 3.0) <= 1e-12, "eigen oracle lambda_min(-sym B**) = " + num(eig));
  ValidateOptions vo;
  vo.slack = 1e-6;
  bool all = true;
  double worst = 0.0;
  for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 3}, {3, 0}, {1, 2}}) {
    const ConvergenceReport r = validate_certificate(m, c, point_mass(3, a), point_mass(3, b), 0.0, 4.0, vo);
    all = all && r.passed;
    worst = std::max(worst, r.max_violation);
  }
  o.require(all, "transient decay within envelope, max violation " + num(worst) + " <= 1e-6");
}

void bulk_arrival_example_check(Outcome& o) {
  const ChainModel m = bulk_arrival_example(199, 90.0);
  const BoundCertificate c = antisym_offdiag_bound(m, antisymmetrizing_weights(build_Bstar(m)));
  const RateFunction stated = trig(2.0, 1.0, 1.0);

  const PeriodGrid grid;
  const auto r = c.rate.on_grid(grid);
  double dev = 0.0, slack_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid.points; ++k) {
    dev = std::max(dev, std::abs(r[k] - stated(grid.node(k))));
    slack_min = std::min(slack_min, r[k] - stated(grid.node(k)));
  }
  o.require(dev <= 1e-12, "beta*(t) = 2 + sin 2pi t + cos 2pi t pointwise: max deviation " + num(dev) +
                              " (computed beta* mean " + num(c.rate.mean()) + ")");
  o.require(slack_min >= -1e-9, "computed beta*(t) dominates 2 + sin + cos pointwise (min gap " + num(slack_min) + ")");

  // The stated rate as an envelope, checked against the transient difference over [0, 6].
  BoundCertificate stated_cert = c;
  stated_cert.rate = RateProfile::exact(stated);
  stated_cert.sharp = false;
  ValidateOptions vo;
  vo.points = 601;
  const ConvergenceReport vr = validate_certificate(m, stated_cert, point_mass(199, 0), point_mass(199, 199), 0.0,
                                                    6.0, vo);
  o.require(vr.passed, "stated-rate envelope holds on [0, 6] (max violation " + num(vr.max_violation) + ")");

  const Trajectory tr = solve_kolmogorov(m, point_mass(199, 0), 0.0, 6.0);
  const std::vector<double> ex = expected_value(tr);
  bool bounded = true;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const auto& p = tr.states[i];
    bounded = bounded && p.minCoeff() >= -1e-12 && p.maxCoeff() <= 1.0 + 1e-12 && ex[i] >= 0.0 && ex[i] <= 199.0;
  }
  o.require(bounded && mass_drift(tr) <= 1e-10, "E[X], p_0, p_99, p_199 on [0, 6] are probabilities, mass drift " +
                                                    num(mass_drift(tr)));
  // One period apart after t = 5 the curves repeat.
  const double per = std::max({std::abs(tr.at(5.0)(0) - tr.at(6.0)(0)), std::abs(tr.at(5.0)(99) - tr.at(6.0)(99)),
                               std::abs(tr.at(5.0)(199) - tr.at(6.0)(199)), std::abs(ex[500] - ex[600])});
  o.require(per <= 1e-3, "periodic on [5, 6]: |curve(5) - curve(6)| " + num(per) + " <= 1e-3");

  const double ts = find_tstar(c, 2.0, 1e-3);
  const double ts_stated = find_tstar(stated_cert, 2.0, 1e-3);
  o.require(ts <= 5.0 && ts_stated <= 5.0,
            "t*(gap 2, delta 1e-3) = " + num(ts) + " (stated rate: " + num(ts_stated) + ") <= 5");
}

void bulk_service_example_check(Outcome& o) {
  const ChainModel m = bulk_service_example(40, 1.0);
  const RateFunction lambda = m.birth_rate(0);
  for (double eps : {0.3, 0.5, 0.7}) {
    const BoundCertificate c = batch_service_bound(m, eps);
    const RateProfile stated = RateProfile::exact((1.0 - eps) * lambda);
    const double rate_gap = std::abs(c.rate.mean() - stated.mean());
    ValidateOptions vo;
    vo.points = 1401;
    vo.slack = 1e-6;
    const ConvergenceReport r = validate_certificate(m, c, point_mass(40, 0), point_mass(40, 40), 0.0, 14.0, vo);
    o.require(r.passed && rate_gap <= 1e-12 && std::abs(c.constant - std::pow(eps, -39.0)) <= 1e-9 * c.constant,
              "eps " + num(eps) + ": envelope eps^(1-S) exp(-int (1-eps) lambda) holds (max violation " +
                  num(r.max_violation) + ", min observed/envelope " + num(r.min_ratio) + ", compared to t=" +
                  num(r.resolved_until) + ")");
  }
  const Trajectory a = solve_kolmogorov(m, point_mass(40, 0), 0.0, 15.0);
  const Trajectory b = solve_kolmogorov(m, point_mass(40, 40), 0.0, 15.0);
  const auto ea = expected_value(a), eb = expected_value(b);
  double gap14 = 0.0;
  for (std::size_t i = 0; i < a.times.size(); ++i)
    if (a.times[i] >= 14.0 - 1e-12) gap14 = std::max(gap14, std::abs(ea[i] - eb[i]));
  o.require(gap14 <= 1e-3, "E[X] from X(0)=0 and X(0)=40 agree on [14, 15]: max gap " + num(gap14) + " <= 1e-3");
  const double slow = oracle::decay_from_eig(build_Bstar(m).constant_part());
  o.detail += "; spectral rate of the period-averaged B*: " + num(slow);
}

void method_agreement(Outcome& o) {
  std::mt19937 rng(20240606);
  std::uniform_int_distribution<int> size(2, 8);
  const PeriodGrid grid;
  double worst = 0.0;
  bool nonneg = true;
  for (int trial = 0; trial < 30; ++trial) {
    const int S = size(rng);
    const ChainModel m =
        trial % 2 ? oracle::random_batch_service(rng, S, true) : oracle::random_periodic_birth_death(rng, S);
    const MatrixFunction B = build_Bstar(m);
    nonneg = nonneg && is_essentially_nonnegative(B, grid);
    const auto ad = pattern_alpha(B, template_weights(SignPattern::all_positive(S), 1.0), grid).alpha_D.on_grid(grid);
    const auto al = alpha_functions(B, grid).alpha.on_grid(grid);
    for (int k = 0; k < grid.points; ++k) worst = std::max(worst, std::abs(ad[k] - al[k]));
  }
  o.require(nonneg, "B* essentially nonnegative on every model");
  o.require(worst <= 1e-10, "|alpha_D - alpha| max " + num(worst) + " <= 1e-10");
}

void batch_service_construction(Outcome& o) {
  const double lambda = 1.0, b = 0.1;
  double rate_err = 0.0, c_err = 0.0;
  for (int S = 2; S <= 10; ++S) {
    const MatrixFunction B = build_Bstar(pure_batch_service_chain(S, lambda, b));
    for (double eps : {0.1, 0.5, 0.9}) {
      const ExhaustiveResult r = exhaustive_alpha(B, {eps});
      rate_err = std::max(rate_err, std::abs(r.alpha_star.mean() - lambda * (1.0 - eps)));
      if (!r.alpha_star.is_exact()) rate_err = std::max(rate_err, 1.0);
      const BoundCertificate c = assemble_certificate(r.alpha_star, eps, S);
      c_err = std::max(c_err, std::abs(c.constant / std::pow(eps, 1.0 - S) - 1.0));
    }
  }
  o.require(rate_err <= 1e-12, "exhaustive alpha* vs lambda (1 - eps): max err " + num(rate_err) + " <= 1e-12");
  o.require(c_err <= 1e-12, "C = eps^(1-S): max relative err " + num(c_err));
}

void solver_soundness(Outcome& o) {
  double err = 0.0;
  for (auto [lam, mu, p1] : std::vector<std::tuple<double, double, double>>{{2, 3, 0}, {0.1, 10, 1}, {7, 0.5, 0.3}}) {
    const ChainModel m = birth_death_chain({lam}, {mu});
    Eigen::VectorXd p0(2);
    p0 << 1.0 - p1, p1;
    SolverOptions so;
    so.tol = 1e-10;
    const Trajectory tr = solve_kolmogorov(m, p0, 0.0, 5.0, so);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      err = std::max(err, std::abs(tr.states[i](1) - oracle::two_state_p1(lam, mu, p1, tr.times[i])));
  }
  o.require(err <= 1e-8, "2x2 analytic exponential: max err " + num(err) + " <= 1e-8");

  std::mt19937 rng(20240808);
  double drift = 0.0;
  for (const ChainModel& m : {oracle::random_periodic_birth_death(rng, 10), oracle::random_batch_arrival(rng, 8),
                              oracle::random_batch_service(rng, 8, false), oracle::random_batch_both(rng, 6),
                              bulk_service_example(40, 1.0), bulk_arrival_example(30, 90.0)}) {
    drift = std::max(drift, mass_drift(solve_kolmogorov(m, uniform_distribution(m.S), 0.0, 3.0)));
    drift = std::max(drift, mass_drift(solve_kolmogorov(m, point_mass(m.S, 0), 0.0, 3.0)));
  }
  o.require(drift <= 1e-10, "mass conservation: max |sum p - 1| " + num(drift) + " <= 1e-10");

  const ChainModel bd = oracle::random_birth_death(rng, 5);
  const BoundCertificate c = decay_parameter_bound(bd);
  const ConvergenceReport good = validate_certificate(bd, c, point_mass(5, 5), point_mass(5, 0), 0.0, 3.0);
  const ConvergenceReport bad =
      validate_certificate(bd, with_scaled_rate(c, 1.5), point_mass(5, 5), point_mass(5, 0), 0.0, 3.0);
  o.require(good.passed && !bad.passed && bad.max_violation > 0.0,
            "falsification: sound certificate passes, rate x1.5 fails (max violation " + num(bad.max_violation) +
                ")");
}

}  // namespace

int main() {
  criterion(1, "decay-parameter weights are sharp", decay_parameter_sharpness);
  criterion(2, "completing squares matches the eigenvalue oracle", squares_oracle);
  criterion(3, "batch-arrival closed form, S=3, mu=(1,2,3)", batch_arrival_closed_form);
  criterion(4, "bulk-arrival example, S=199, m=90", bulk_arrival_example_check);
  criterion(5, "bulk-service example, S=40, m=1", bulk_service_example_check);
  criterion(6, "unit template agrees with the logarithmic norm", method_agreement);
  criterion(7, "sign-pattern construction for pure batch service", batch_service_construction);
  criterion(8, "solver soundness", solver_soundness);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
