#pragma once

#include <map>

#include <Eigen/Dense>

#include "ctmc/rate_function.hpp"

namespace ctmc {

/// Uniform sampling grid over one period [0, 1], endpoints included.
struct PeriodGrid {
  int points = 2001;

  double node(int k) const { return static_cast<double>(k) / (points - 1); }
  double spacing() const { return 1.0 / (points - 1); }
};

/// Square matrix whose entries are trigonometric polynomials of time:
///   M(t) = M_0 + sum_k [ sin(2 pi k t) M_k^s + cos(2 pi k t) M_k^c ].
/// Linear maps (similarity transforms, column sums) act coefficient-wise,
/// so derived quantities stay exact trigonometric polynomials.
class MatrixFunction {
 public:
  struct Harmonic {
    Eigen::MatrixXd sin;
    Eigen::MatrixXd cos;
  };

  explicit MatrixFunction(int dim = 0);

  int dim() const { return dim_; }
  bool is_constant() const { return harmonics_.empty(); }

  const Eigen::MatrixXd& constant_part() const { return constant_; }
  const std::map<int, Harmonic>& harmonics() const { return harmonics_; }

  /// entry(i, j) += f
  void add(int i, int j, const RateFunction& f);

  Eigen::MatrixXd operator()(double t) const;
  RateFunction entry(int i, int j) const;

  /// Applies a linear map X -> op(X) to every coefficient matrix.
  template <class Op>
  MatrixFunction transformed(Op&& op) const {
    MatrixFunction out;
    out.constant_ = op(constant_);
    out.dim_ = static_cast<int>(out.constant_.rows());
    for (const auto& [k, h] : harmonics_) out.harmonics_[k] = Harmonic{op(h.sin), op(h.cos)};
    return out;
  }

  /// Largest absolute coefficient over all coefficient matrices.
  double max_abs_coefficient() const;

  /// Sets coefficients with |x| <= threshold to exactly zero.
  void snap_to_zero(double threshold);

 private:
  Harmonic& harmonic(int k);

  int dim_ = 0;
  Eigen::MatrixXd constant_;
  std::map<int, Harmonic> harmonics_;
};

}  // namespace ctmc
