#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctmc/certificate.hpp"
#include "ctmc/model.hpp"

namespace ctmc {

struct SolverOptions {
  double tol = 1e-10;          // local error per step (absolute + relative)
  double output_step = 0.01;   // spacing of reported times
  bool implicit_midpoint = false;  // stiff fallback with fixed steps
  double fixed_step = 1e-4;    // step of the implicit-midpoint fallback
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
};

struct Renormalization {
  double t;
  double drift;
};

/// p(t) on reported times; steps land exactly on reported times, at(t)
/// interpolates between them with cubic Hermite polynomials.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> derivatives;  // A(t) p(t) at reported times
  int initial_state = -1;  // -1 when p0 is not a point mass
  double solver_tolerance = 0.0;
  long steps = 0;
  long rejected = 0;
  std::vector<Renormalization> renormalizations;

  int S() const { return states.empty() ? 0 : static_cast<int>(states.front().size()) - 1; }
  Eigen::VectorXd at(double t) const;
};

Eigen::VectorXd point_mass(int S, int k);
Eigen::VectorXd uniform_distribution(int S);
/// "uniform" or a state index.
Eigen::VectorXd parse_initial(const std::string& spec, int S);

/// Reported times t0, t0 + step, ..., t1 (t1 always included).
std::vector<double> output_times(double t0, double t1, double step);

/// Integrates p' = A(t) p on [t0, t1].
Trajectory solve_kolmogorov(const ChainModel& model, const Eigen::VectorXd& p0, double t0, double t1,
                            const SolverOptions& opts = {});

/// E[X(t)] = sum_k k p_k(t) at every reported time.
std::vector<double> expected_value(const Trajectory& traj);

struct ValidateOptions {
  double tol = 1e-11;
  int points = 501;             // reported times over the horizon
  double slack = 1e-6;          // allowed relative violation
  double delta = 1e-3;          // discrepancy for t*
  double min_envelope = 1e-9;   // compare only while C e^{-int rate} stays above this
  bool implicit_midpoint = false;
  double fixed_step = 1e-5;
};

struct ConvergenceReport {
  BoundCertificate certificate;
  std::vector<double> times;             // compared times (from s on)
  std::vector<double> log_observed_ratio;  // log(||w(t)|| / ||w(s)||)
  std::vector<double> log_envelope;        // log(C) - int_s^t rate
  double max_violation = 0.0;   // max (observed / envelope - 1), >= 0
  double min_ratio = 1.0;       // min observed / envelope over compared times
  double resolved_until = 0.0;  // last compared time
  double difference_drift = 0.0;  // max |carried difference - (p_a - p_b)|
  double t_star = 0.0;
  double delta = 0.0;
  double slack = 0.0;
  bool passed = false;
};

/// Solves both trajectories and the difference (carried as its own column so
/// its accuracy is controlled relative to its size in the certificate norm),
/// maps y = p_a - p_b through T and D, and checks the certificate inequality.
ConvergenceReport validate_certificate(const ChainModel& model, const BoundCertificate& cert,
                                       const Eigen::VectorXd& p0a, const Eigen::VectorXd& p0b, double t0,
                                       double t1, const ValidateOptions& opts = {});

/// Re-checks the structural hypotheses of a certificate against a model;
/// throws Refusal on mismatch.
void check_applicable(const ChainModel& model, const BoundCertificate& cert);

/// log ||D T y|| in the certificate norm (y on states 1..S).
double log_weighted_norm(const BoundCertificate& cert, const Eigen::VectorXd& y);

/// Smallest t >= valid_from after which C exp(-int rate) gap <= delta for all
/// later times. Arguments in log form to handle huge weights.
double find_tstar_log(const BoundCertificate& cert, double log_initial_gap, double log_delta);
double find_tstar(const BoundCertificate& cert, double initial_gap, double delta);

/// Largest ||D T y|| over pairs of distributions: ||d|| (from delta_0 vs delta_S).
double log_worst_gap(const BoundCertificate& cert);

struct LimitingRegime {
  double t_star = 0.0;
  Trajectory period;  // [t*, t* + 1]
};

/// Integrates from delta_0 at 0 to t*, then returns one period.
LimitingRegime limiting_regime(const ChainModel& model, const BoundCertificate& cert, double delta,
                               const SolverOptions& opts = {});

/// Columns t, p_0..p_S, E[X].
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
/// Columns t, E[X], p_k for the given states.
void write_reduced_csv(const Trajectory& traj, const std::vector<int>& states, std::ostream& out);

}  // namespace ctmc
