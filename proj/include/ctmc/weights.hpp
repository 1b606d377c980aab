#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace ctmc {

/// Diagonal similarity weights d_1..d_S, stored as (log|d_i|, sign_i) so that
/// geometric weight sequences (d_{k+1} = m d_k over hundreds of states) do
/// not overflow. Index 0 holds d_1.
class WeightVector {
 public:
  WeightVector() = default;

  static WeightVector unit(int S);
  /// From plain values; any zero throws.
  static WeightVector from_values(std::span<const double> d);
  static WeightVector from_log(std::vector<double> log_abs, std::vector<int> signs);

  int size() const { return static_cast<int>(log_abs_.size()); }
  bool is_signed() const;
  bool all_positive() const { return !is_signed(); }

  double log_abs(int i) const { return log_abs_[i]; }
  int sign(int i) const { return signs_[i]; }
  /// d_i (may overflow to +-inf for extreme weights).
  double value(int i) const { return signs_[i] * std::exp(log_abs_[i]); }
  /// d_i / d_j, computed without forming d_i or d_j.
  double ratio(int i, int j) const {
    return signs_[i] * signs_[j] * std::exp(log_abs_[i] - log_abs_[j]);
  }

  std::vector<double> values() const;
  const std::vector<double>& log_abs_values() const { return log_abs_; }
  const std::vector<int>& signs() const { return signs_; }

  /// log(max|d| / min|d|).
  double log_spread() const;

  /// Rescaled so that d_1 = +-1 with its sign kept.
  WeightVector normalized_first() const;

  bool operator==(const WeightVector&) const = default;

 private:
  std::vector<double> log_abs_;
  std::vector<int> signs_;
};

}  // namespace ctmc
