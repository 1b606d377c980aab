#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ctmc/certificate.hpp"
#include "ctmc/model.hpp"
#include "ctmc/weights.hpp"

namespace ctmc {

/// Witnesses of the completing-squares representation
///   -1/2 dV/dt = beta* sum_k w_k^2 + sum_{k<S} (lead_k w_k - trail_k w_{k+1})^2 + terminal w_S^2
/// for V = |w|^2 and dw/dt = B** w with B** symmetric tridiagonal.
struct SquaresDecomposition {
  double beta_star = 0.0;
  std::vector<double> phis;    // elimination pivots 1..S-1 at beta_star, all > 0
  std::vector<double> leads;   // sqrt(phi_k)
  std::vector<double> trails;  // b**_{k,k+1} / sqrt(phi_k)
  double terminal = 0.0;       // leftover coefficient of w_S^2, >= 0, -> 0 as the segment shrinks

  struct Step {
    double lo, hi;
    bool forward;   // elimination direction used to judge the midpoint
    bool feasible;  // midpoint below beta*
  };
  std::vector<Step> direction_log;
};

/// d_1 = 1, d_{k+1} = d_k sqrt(mu_k / lambda_k): makes B** of a homogeneous
/// birth-death chain symmetric with off-diagonals sqrt(lambda_k mu_k).
WeightVector symmetrize_bd(const ChainModel& model);

/// Nested-segment bisection on beta using the completing-squares sweep,
/// alternating the elimination direction between steps.
SquaresDecomposition beta_star_squares(const Eigen::MatrixXd& bss, double width = 1e-10);

/// Smallest eigenvalue of -B** (symmetric), used as an oracle.
double beta_star_eig(const Eigen::MatrixXd& bss);

/// Largest |coefficient| of -B** - beta* I - sum of squares - terminal e_S e_S^T.
double squares_residual(const Eigen::MatrixXd& bss, const SquaresDecomposition& dec);

/// l2 certificate for a homogeneous birth-death chain with positive rates.
BoundCertificate birth_death_l2_bound(const ChainModel& model);

/// l2 certificate for a homogeneous batch-arrival chain with q_{k,k+1} = 0,
/// q_{k,k+i} = lambda (i >= 2) and positive deaths mu_k.
BoundCertificate batch_arrival_bound(const ChainModel& model, const PeriodGrid& grid = {});

/// l2 certificate when D B* D^{-1} has antisymmetric off-diagonal part: then
/// dV/dt = 2 sum b**_kk w_k^2 and the rate is min_k(-b**_kk(t)).
BoundCertificate antisym_offdiag_bound(const ChainModel& model, const WeightVector& d,
                                       const PeriodGrid& grid = {});

/// d_1 = 1 and d_{k+1}/d_k chosen so that b**_{k,k+1} = -b**_{k+1,k} for
/// every t; requires b*_{k,k+1} = -r_k^2 b*_{k+1,k} coefficient-wise.
/// Throws Refusal when no such weights exist.
WeightVector antisymmetrizing_weights(const MatrixFunction& bstar);

/// d_1 = 1, d_{k+1} = ratio d_k.
WeightVector geometric_weights(int S, double ratio);

/// log(max|d|/min|d| * cond_2(T)).
double log_plain_factor_l2(const WeightVector& d);

}  // namespace ctmc
