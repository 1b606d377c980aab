#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ctmc/certificate.hpp"
#include "ctmc/matrix_function.hpp"
#include "ctmc/model.hpp"
#include "ctmc/weights.hpp"

namespace ctmc {

/// l1 logarithmic norm: max over columns of (diagonal + sum of |off-diagonal|).
double log_norm(const Eigen::MatrixXd& m);

struct RatePair {
  RateProfile alpha;                  // inf_i alpha_i(t)
  RateProfile beta;                   // sup_i alpha_i(t)
  std::vector<RateFunction> per_state;  // alpha_i(t) = -(column i sum of B**)
};

RatePair alpha_functions(const MatrixFunction& bss, const PeriodGrid& grid = {});

/// Logarithmic-norm certificate in the weighted l1 norm (C = 1), with the
/// lower-bound rate beta for componentwise nonnegative w(s).
/// Refuses (Refusal) when B* is not essentially nonnegative on the grid.
/// Weights are rescaled so that d_1 = 1.
BoundCertificate ergodicity_bound(const ChainModel& model, const WeightVector& d,
                                  double valid_from = 0.0, const PeriodGrid& grid = {});

struct PowerIterationOptions {
  double tolerance = 1e-12;
  long max_iterations = 1'000'000;
};

struct DecayWeights {
  WeightVector weights;  // d_1 = 1
  double alpha_star = 0.0;
  long iterations = 0;
};

/// Diagonal weights making every column sum of D B* D^{-1} equal to -alpha*,
/// from the Perron vector of B*^T + shift I. B* must be constant, essentially
/// nonnegative and irreducible.
DecayWeights decay_parameter_weights(const Eigen::MatrixXd& bstar, const PowerIterationOptions& opts = {});

/// Sharp certificate for a homogeneous chain with constant, irreducible,
/// essentially nonnegative B* (e.g. a finite birth-death chain with positive rates).
BoundCertificate decay_parameter_bound(const ChainModel& model, const PowerIterationOptions& opts = {});

/// log(||D T||_1 ||T^{-1} D^{-1}||_1).
double log_plain_factor_l1(const WeightVector& d);

}  // namespace ctmc
