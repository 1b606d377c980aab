#include "ctmc/matrix_function.hpp"

#include <cmath>
#include <numbers>

namespace ctmc {

MatrixFunction::MatrixFunction(int dim) : dim_(dim), constant_(Eigen::MatrixXd::Zero(dim, dim)) {}

MatrixFunction::Harmonic& MatrixFunction::harmonic(int k) {
  auto it = harmonics_.find(k);
  if (it == harmonics_.end()) {
    it = harmonics_
             .emplace(k, Harmonic{Eigen::MatrixXd::Zero(dim_, dim_), Eigen::MatrixXd::Zero(dim_, dim_)})
             .first;
  }
  return it->second;
}

void MatrixFunction::add(int i, int j, const RateFunction& f) {
  constant_(i, j) += f.constant();
  for (const auto& [k, h] : f.harmonics()) {
    auto& m = harmonic(k);
    m.sin(i, j) += h.sin_coeff;
    m.cos(i, j) += h.cos_coeff;
  }
}

Eigen::MatrixXd MatrixFunction::operator()(double t) const {
  Eigen::MatrixXd m = constant_;
  for (const auto& [k, h] : harmonics_) {
    const double arg = 2.0 * std::numbers::pi * k * t;
    m.noalias() += std::sin(arg) * h.sin;
    m.noalias() += std::cos(arg) * h.cos;
  }
  return m;
}

RateFunction MatrixFunction::entry(int i, int j) const {
  RateFunction f(constant_(i, j));
  for (const auto& [k, h] : harmonics_) {
    if (h.sin(i, j) != 0.0 || h.cos(i, j) != 0.0) f.add_harmonic(k, h.sin(i, j), h.cos(i, j));
  }
  return f;
}

double MatrixFunction::max_abs_coefficient() const {
  double m = constant_.size() ? constant_.cwiseAbs().maxCoeff() : 0.0;
  for (const auto& [k, h] : harmonics_) {
    m = std::max({m, h.sin.cwiseAbs().maxCoeff(), h.cos.cwiseAbs().maxCoeff()});
  }
  return m;
}

void MatrixFunction::snap_to_zero(double threshold) {
  auto snap = [threshold](Eigen::MatrixXd& x) {
    x = x.unaryExpr([threshold](double v) { return std::abs(v) <= threshold ? 0.0 : v; });
  };
  snap(constant_);
  for (auto it = harmonics_.begin(); it != harmonics_.end();) {
    snap(it->second.sin);
    snap(it->second.cos);
    if (it->second.sin.isZero(0.0) && it->second.cos.isZero(0.0)) {
      it = harmonics_.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace ctmc
