#include "ctmc/matrices.hpp"

#include <optional>

#include "ctmc/errors.hpp"

namespace ctmc {

namespace {

constexpr double kOffDiagonalTol = 1e-12;
// Round-off left by T B T^{-1} in structurally zero entries.
constexpr double kSnapRelative = 1e-13;

}  // namespace

MatrixFunction build_A(const ChainModel& model) {
  require_valid(model);
  const int S = model.S;
  MatrixFunction A(S + 1);
  auto transition = [&](int from, int to, const RateFunction& r) {
    A.add(to, from, r);
    A.add(from, from, -r);
  };

  for (int i = 0; i <= S; ++i) {
    if (model.uses_birth() && i < S) {
      if (auto it = model.birth.find(i); it != model.birth.end()) transition(i, i + 1, it->second);
    }
    if (model.uses_death() && i > 0) {
      if (auto it = model.death.find(i); it != model.death.end()) transition(i, i - 1, it->second);
    }
    if (model.uses_arrival_batches()) {
      for (const auto& [k, r] : model.arrival_batch) {
        if (i + k <= S) transition(i, i + k, r);
      }
    }
    if (model.uses_service_batches()) {
      for (const auto& [k, r] : model.service_batch) {
        if (i - k >= 0) transition(i, i - k, r);
      }
    }
  }
  return A;
}

MatrixFunction build_B(const ChainModel& model) {
  const MatrixFunction A = build_A(model);
  const int S = model.S;
  return A.transformed([S](const Eigen::MatrixXd& a) {
    Eigen::MatrixXd b = a.bottomRightCorner(S, S);
    b.colwise() -= a.col(0).tail(S);
    return b;
  });
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> transform_T(int S) {
  if (S < 1) throw ModelError("transform_T needs S >= 1");
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(S, S);
  Eigen::MatrixXd Tinv = Eigen::MatrixXd::Identity(S, S);
  for (int i = 0; i < S; ++i) {
    for (int j = i; j < S; ++j) T(i, j) = 1.0;
    if (i + 1 < S) Tinv(i, i + 1) = -1.0;
  }
  return {T, Tinv};
}

MatrixFunction build_Bstar(const ChainModel& model) {
  const MatrixFunction B = build_B(model);
  const int S = model.S;
  // T B T^{-1} without forming products with dense T: T X is a reverse
  // cumulative row sum, X T^{-1} is a forward column difference.
  MatrixFunction out = B.transformed([S](const Eigen::MatrixXd& b) {
    Eigen::MatrixXd tb = b;
    for (int i = S - 2; i >= 0; --i) tb.row(i) += tb.row(i + 1);
    Eigen::MatrixXd r = tb;
    for (int j = S - 1; j >= 1; --j) r.col(j) -= tb.col(j - 1);
    return r;
  });
  out.snap_to_zero(kSnapRelative * out.max_abs_coefficient());
  return out;
}

MatrixFunction conjugate_by_weights(const MatrixFunction& m, const WeightVector& d) {
  if (d.size() != m.dim()) throw ModelError("weight vector length does not match matrix dimension");
  const int n = m.dim();
  return m.transformed([&d, n](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd r = x;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (i != j && r(i, j) != 0.0) r(i, j) *= d.ratio(i, j);
      }
    }
    return r;
  });
}

MatrixFunction weight_conjugate(const MatrixFunction& bstar, const WeightVector& d) {
  if (d.is_signed()) throw ModelError("weight_conjugate requires positive weights");
  return conjugate_by_weights(bstar, d);
}

std::optional<OffDiagonalViolation> find_negative_offdiagonal(const MatrixFunction& m,
                                                              const PeriodGrid& grid) {
  const int n = m.dim();
  // Exact lower bounds first; only entries that could dip below tolerance are sampled.
  std::vector<std::pair<int, int>> suspects;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      const RateFunction e = m.entry(i, j);
      if (e.is_constant()) {
        if (e.constant() < -kOffDiagonalTol) return OffDiagonalViolation{i, j, 0.0, e.constant()};
      } else if (e.lower_bound() < -kOffDiagonalTol) {
        suspects.emplace_back(i, j);
      }
    }
  }
  for (const auto& [i, j] : suspects) {
    const RateFunction e = m.entry(i, j);
    for (int k = 0; k < grid.points; ++k) {
      const double t = grid.node(k);
      const double v = e(t);
      if (v < -kOffDiagonalTol) return OffDiagonalViolation{i, j, t, v};
    }
  }
  return std::nullopt;
}

bool is_essentially_nonnegative(const MatrixFunction& m, const PeriodGrid& grid) {
  return !find_negative_offdiagonal(m, grid).has_value();
}

}  // namespace ctmc
