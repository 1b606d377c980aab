#include "ctmc/rate_function.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ctmc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

RateFunction& RateFunction::add_harmonic(int k, double sin_coeff, double cos_coeff) {
  if (k < 1) throw std::invalid_argument("harmonic frequency index must be >= 1");
  auto& h = harmonics_[k];
  h.sin_coeff += sin_coeff;
  h.cos_coeff += cos_coeff;
  return *this;
}

double RateFunction::operator()(double t) const {
  double v = constant_;
  for (const auto& [k, h] : harmonics_) {
    const double arg = kTwoPi * k * t;
    v += h.sin_coeff * std::sin(arg) + h.cos_coeff * std::cos(arg);
  }
  return v;
}

double RateFunction::integral(double a, double b) const {
  double v = constant_ * (b - a);
  for (const auto& [k, h] : harmonics_) {
    const double w = kTwoPi * k;
    // d/dt[-cos(wt)/w] = sin(wt), d/dt[sin(wt)/w] = cos(wt)
    v += h.sin_coeff * (std::cos(w * a) - std::cos(w * b)) / w;
    v += h.cos_coeff * (std::sin(w * b) - std::sin(w * a)) / w;
  }
  return v;
}

double RateFunction::lower_bound() const {
  double v = constant_;
  for (const auto& [k, h] : harmonics_) v -= std::hypot(h.sin_coeff, h.cos_coeff);
  return v;
}

double RateFunction::upper_bound() const {
  double v = constant_;
  for (const auto& [k, h] : harmonics_) v += std::hypot(h.sin_coeff, h.cos_coeff);
  return v;
}

RateFunction& RateFunction::prune(double tol) {
  for (auto it = harmonics_.begin(); it != harmonics_.end();) {
    if (std::abs(it->second.sin_coeff) <= tol && std::abs(it->second.cos_coeff) <= tol) {
      it = harmonics_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

RateFunction& RateFunction::operator+=(const RateFunction& other) {
  constant_ += other.constant_;
  for (const auto& [k, h] : other.harmonics_) add_harmonic(k, h.sin_coeff, h.cos_coeff);
  return *this;
}

RateFunction& RateFunction::operator-=(const RateFunction& other) {
  constant_ -= other.constant_;
  for (const auto& [k, h] : other.harmonics_) add_harmonic(k, -h.sin_coeff, -h.cos_coeff);
  return *this;
}

RateFunction& RateFunction::operator*=(double s) {
  constant_ *= s;
  for (auto& [k, h] : harmonics_) {
    h.sin_coeff *= s;
    h.cos_coeff *= s;
  }
  return *this;
}

double eval_rate(const RateFunction& f, double t) { return f(t); }

double mean_over_period(const RateFunction& f) { return f.mean_over_period(); }

}  // namespace ctmc
