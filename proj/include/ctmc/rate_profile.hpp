#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ctmc/matrix_function.hpp"
#include "ctmc/rate_function.hpp"

namespace ctmc {

/// A 1-periodic rate (1/time) used by certificates: either an exact
/// trigonometric polynomial or samples on a uniform period grid with linear
/// interpolation (pointwise minima of trig polynomials are not trig
/// polynomials).
class RateProfile {
 public:
  RateProfile() = default;
  static RateProfile exact(RateFunction f);
  /// samples[k] is the value at k / (n - 1); samples.front() == samples.back().
  static RateProfile sampled(std::vector<double> samples);

  bool is_exact() const { return exact_.has_value(); }
  bool is_constant() const { return exact_ && exact_->is_constant(); }
  const RateFunction& function() const { return *exact_; }
  const std::vector<double>& samples() const { return samples_; }

  double operator()(double t) const;
  /// Integral over [a, b] (exact for both representations).
  double integral(double a, double b) const;
  double mean() const;

  /// Values at the grid nodes.
  std::vector<double> on_grid(const PeriodGrid& grid) const;

  RateProfile scaled(double s) const;

  bool operator==(const RateProfile&) const = default;

 private:
  double cumulative(double t) const;  // integral over [0, t]

  std::optional<RateFunction> exact_;
  std::vector<double> samples_;
  std::vector<double> cumulative_;  // integral from 0 to node k
};

/// Pointwise minimum of trig polynomials. Exact when all are equal, all are
/// constant, or one is provably below all others; otherwise sampled on grid.
RateProfile pointwise_min(std::span<const RateFunction> fs, const PeriodGrid& grid);
RateProfile pointwise_max(std::span<const RateFunction> fs, const PeriodGrid& grid);

}  // namespace ctmc
