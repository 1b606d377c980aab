#pragma once

#include <vector>

#include "ctmc/certificate.hpp"
#include "ctmc/matrix_function.hpp"
#include "ctmc/model.hpp"
#include "ctmc/rate_profile.hpp"
#include "ctmc/weights.hpp"

namespace ctmc {

/// Signs of the coordinates x_1..x_S on an interval of constant sign.
class SignPattern {
 public:
  SignPattern() = default;
  explicit SignPattern(std::vector<int> signs);

  /// Pattern number `index` of S: bit b of index set means coordinate b+2 flips
  /// sign relative to coordinate b+1; coordinate 1 is always +.
  static SignPattern from_index(unsigned long index, int S);
  static SignPattern all_positive(int S) { return SignPattern(std::vector<int>(S, 1)); }

  int size() const { return static_cast<int>(signs_.size()); }
  const std::vector<int>& signs() const { return signs_; }
  /// 0-based indices i where signs[i] != signs[i - 1].
  const std::vector<int>& change_points() const { return changes_; }
  std::string to_string() const;

  bool operator==(const SignPattern&) const = default;

 private:
  std::vector<int> signs_;
  std::vector<int> changes_;
};

struct PatternBound {
  SignPattern pattern;
  WeightVector d;
  RateProfile alpha_D;  // min over columns j of -(sum_i d_i b*_ij / d_j)
  double eps = 0.0;     // template parameter (1 = unit template)
};

/// eps-power template: a block of equal signs [start, m] (1-based) gets
/// |d_i| = eps^{S-m+1+(i-start)}, so each block restarts the powers and the
/// exponents cover 1..S. eps = 1 gives the unit template d_i = signs_i.
WeightVector template_weights(const SignPattern& pattern, double eps);

PatternBound pattern_alpha(const MatrixFunction& bstar, const WeightVector& d, const PeriodGrid& grid = {});

/// Certificate for the pure batch-service chain: births lambda(t) from every
/// state below S and a single service rate b(t) emptying the full system.
/// Rate (1-eps) lambda(t), min'd with lambda + b (1 - sum_{j<S} eps^j) where
/// the latter is smaller; C = eps^{1-S}.
BoundCertificate batch_service_bound(const ChainModel& model, double eps, const PeriodGrid& grid = {});

/// eps in (0,1) maximizing mean(rate) - log(C) / horizon for batch_service_bound.
double optimal_eps(const ChainModel& model, double horizon, const PeriodGrid& grid = {});

inline constexpr int kMaxExhaustiveS = 15;

struct ExhaustiveResult {
  RateProfile alpha_star;
  SignPattern worst_pattern;
  double worst_eps = 0.0;
  double constant = 1.0;        // max template ratio over the templates used
  std::vector<PatternBound> per_pattern;  // chosen template per pattern
};

/// Enumerates every sign pattern (2^{S-1}), picks per pattern the eps in
/// eps_grid with the largest mean alpha_D (eps = 1 selects the unit
/// template), then takes the pointwise minimum across patterns.
ExhaustiveResult exhaustive_alpha(const MatrixFunction& bstar, const std::vector<double>& eps_grid,
                                  const PeriodGrid& grid = {});

/// Plain-l1 certificate for x = T y with rate alpha_star and C = eps^{1-S}.
BoundCertificate assemble_certificate(const RateProfile& alpha_star, double eps, int S);
BoundCertificate assemble_certificate(const ExhaustiveResult& r, int S);

/// exhaustive_alpha on the model's B*, assembled and tagged with the model.
BoundCertificate exhaustive_bound(const ChainModel& model, const std::vector<double>& eps_grid,
                                  const PeriodGrid& grid = {});

}  // namespace ctmc
