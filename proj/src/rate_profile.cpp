#include "ctmc/rate_profile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctmc/errors.hpp"

namespace ctmc {

RateProfile RateProfile::exact(RateFunction f) {
  RateProfile p;
  p.exact_ = std::move(f);
  return p;
}

RateProfile RateProfile::sampled(std::vector<double> samples) {
  if (samples.size() < 2) throw ModelError("sampled rate needs at least two nodes");
  RateProfile p;
  p.samples_ = std::move(samples);
  const double h = 1.0 / static_cast<double>(p.samples_.size() - 1);
  p.cumulative_.resize(p.samples_.size());
  p.cumulative_[0] = 0.0;
  for (std::size_t k = 1; k < p.samples_.size(); ++k) {
    p.cumulative_[k] = p.cumulative_[k - 1] + 0.5 * h * (p.samples_[k - 1] + p.samples_[k]);
  }
  return p;
}

double RateProfile::operator()(double t) const {
  if (exact_) return (*exact_)(t);
  const double frac = t - std::floor(t);
  const double pos = frac * static_cast<double>(samples_.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(pos), samples_.size() - 2);
  const double w = pos - static_cast<double>(k);
  return (1.0 - w) * samples_[k] + w * samples_[k + 1];
}

double RateProfile::cumulative(double t) const {
  const double periods = std::floor(t);
  const double frac = t - periods;
  const double h = 1.0 / static_cast<double>(samples_.size() - 1);
  const double pos = frac / h;
  const auto k = std::min(static_cast<std::size_t>(pos), samples_.size() - 2);
  const double tau = frac - static_cast<double>(k) * h;
  const double slope = (samples_[k + 1] - samples_[k]) / h;
  const double partial = samples_[k] * tau + 0.5 * slope * tau * tau;
  return periods * cumulative_.back() + cumulative_[k] + partial;
}

double RateProfile::integral(double a, double b) const {
  if (exact_) return exact_->integral(a, b);
  return cumulative(b) - cumulative(a);
}

double RateProfile::mean() const {
  if (exact_) return exact_->mean_over_period();
  return cumulative_.back();
}

std::vector<double> RateProfile::on_grid(const PeriodGrid& grid) const {
  std::vector<double> v(grid.points);
  for (int k = 0; k < grid.points; ++k) v[k] = (*this)(grid.node(k));
  return v;
}

RateProfile RateProfile::scaled(double s) const {
  if (exact_) return exact(*exact_ * s);
  std::vector<double> v = samples_;
  for (auto& x : v) x *= s;
  return sampled(std::move(v));
}

namespace {

double coefficient_scale(const RateFunction& f) {
  double s = std::abs(f.constant());
  for (const auto& [k, h] : f.harmonics()) s += std::abs(h.sin_coeff) + std::abs(h.cos_coeff);
  return s;
}

// Index of a function that is provably <= (sign=+1) or >= (sign=-1) every
// other one for all t, if any.
std::optional<std::size_t> dominant(std::span<const RateFunction> fs, double sign) {
  std::vector<std::size_t> order(fs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sign * fs[a].constant() < sign * fs[b].constant();
  });
  for (std::size_t j : order) {
    bool ok = true;
    for (std::size_t i = 0; i < fs.size() && ok; ++i) {
      if (i == j) continue;
      const RateFunction diff = (fs[i] - fs[j]) * sign;
      const double slack = 1e-13 * (1.0 + coefficient_scale(fs[i]) + coefficient_scale(fs[j]));
      ok = diff.lower_bound() >= -slack;
    }
    if (ok) return j;
    // A later candidate with a larger mean cannot dominate.
    break;
  }
  return std::nullopt;
}

RateProfile pointwise_extreme(std::span<const RateFunction> fs, const PeriodGrid& grid, double sign) {
  if (fs.empty()) throw ModelError("pointwise extremum of an empty set");
  if (auto j = dominant(fs, sign)) return RateProfile::exact(fs[*j]);
  std::vector<double> v(grid.points);
  for (int k = 0; k < grid.points; ++k) {
    const double t = grid.node(k);
    double best = fs[0](t);
    for (std::size_t i = 1; i < fs.size(); ++i) {
      const double x = fs[i](t);
      best = sign > 0 ? std::min(best, x) : std::max(best, x);
    }
    v[k] = best;
  }
  v.back() = v.front();
  return RateProfile::sampled(std::move(v));
}

}  // namespace

RateProfile pointwise_min(std::span<const RateFunction> fs, const PeriodGrid& grid) {
  return pointwise_extreme(fs, grid, +1.0);
}

RateProfile pointwise_max(std::span<const RateFunction> fs, const PeriodGrid& grid) {
  return pointwise_extreme(fs, grid, -1.0);
}

}  // namespace ctmc
