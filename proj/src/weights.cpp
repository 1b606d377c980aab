#include "ctmc/weights.hpp"

#include <algorithm>

#include "ctmc/errors.hpp"

namespace ctmc {

WeightVector WeightVector::unit(int S) {
  WeightVector w;
  w.log_abs_.assign(S, 0.0);
  w.signs_.assign(S, 1);
  return w;
}

WeightVector WeightVector::from_values(std::span<const double> d) {
  WeightVector w;
  w.log_abs_.reserve(d.size());
  w.signs_.reserve(d.size());
  for (double x : d) {
    if (!(x != 0.0) || !std::isfinite(x)) throw ModelError("weights must be finite and nonzero");
    w.log_abs_.push_back(std::log(std::abs(x)));
    w.signs_.push_back(x > 0 ? 1 : -1);
  }
  return w;
}

WeightVector WeightVector::from_log(std::vector<double> log_abs, std::vector<int> signs) {
  if (log_abs.size() != signs.size()) throw ModelError("weight log/sign length mismatch");
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw ModelError("weight signs must be +-1");
    if (!std::isfinite(log_abs[i])) throw ModelError("weight magnitudes must be finite and nonzero");
  }
  WeightVector w;
  w.log_abs_ = std::move(log_abs);
  w.signs_ = std::move(signs);
  return w;
}

bool WeightVector::is_signed() const {
  return std::any_of(signs_.begin(), signs_.end(), [](int s) { return s < 0; });
}

std::vector<double> WeightVector::values() const {
  std::vector<double> v(log_abs_.size());
  for (int i = 0; i < size(); ++i) v[i] = value(i);
  return v;
}

double WeightVector::log_spread() const {
  if (log_abs_.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(log_abs_.begin(), log_abs_.end());
  return *hi - *lo;
}

WeightVector WeightVector::normalized_first() const {
  WeightVector w = *this;
  if (w.log_abs_.empty()) return w;
  const double shift = w.log_abs_[0];
  for (auto& x : w.log_abs_) x -= shift;
  return w;
}

}  // namespace ctmc
