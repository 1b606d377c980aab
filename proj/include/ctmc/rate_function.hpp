#pragma once

#include <map>
#include <utility>

namespace ctmc {

/// Trigonometric polynomial of time with base period 1:
///   f(t) = c + sum_k [ s_k sin(2 pi k t) + c_k cos(2 pi k t) ].
///
/// Every transition intensity is one of these, and so is every entry of the
/// derived matrices (they are linear combinations of intensities). No sign
/// constraint is imposed here; nonnegativity of intensities is a model-level
/// check.
class RateFunction {
 public:
  struct Harmonic {
    double sin_coeff = 0.0;
    double cos_coeff = 0.0;
    bool operator==(const Harmonic&) const = default;
  };

  RateFunction() = default;
  RateFunction(double constant) : constant_(constant) {}  // NOLINT(implicit)

  /// Adds (accumulates) a harmonic term. Frequency index must be >= 1.
  RateFunction& add_harmonic(int k, double sin_coeff, double cos_coeff);

  double constant() const { return constant_; }
  const std::map<int, Harmonic>& harmonics() const { return harmonics_; }

  bool is_constant() const { return harmonics_.empty(); }

  double operator()(double t) const;

  /// Mean over one period, i.e. the constant term.
  double mean_over_period() const { return constant_; }

  /// Exact integral over [a, b].
  double integral(double a, double b) const;

  /// Lower bound of min_t f(t): constant minus the sum of harmonic amplitudes.
  double lower_bound() const;
  /// Upper bound of max_t f(t).
  double upper_bound() const;

  /// Drops harmonics whose coefficients are both zero.
  RateFunction& prune(double tol = 0.0);

  RateFunction& operator+=(const RateFunction& other);
  RateFunction& operator-=(const RateFunction& other);
  RateFunction& operator*=(double s);

  friend RateFunction operator+(RateFunction a, const RateFunction& b) { return a += b; }
  friend RateFunction operator-(RateFunction a, const RateFunction& b) { return a -= b; }
  friend RateFunction operator*(RateFunction a, double s) { return a *= s; }
  friend RateFunction operator*(double s, RateFunction a) { return a *= s; }
  friend RateFunction operator-(RateFunction a) { return a *= -1.0; }

  bool operator==(const RateFunction&) const = default;

 private:
  double constant_ = 0.0;
  std::map<int, Harmonic> harmonics_;
};

double eval_rate(const RateFunction& f, double t);
double mean_over_period(const RateFunction& f);

}  // namespace ctmc
