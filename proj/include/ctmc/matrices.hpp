#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "ctmc/matrix_function.hpp"
#include "ctmc/model.hpp"
#include "ctmc/weights.hpp"

namespace ctmc {

/// Transposed intensity matrix on {0..S}: a_ij(t) = q_ji(t), columns sum to zero.
MatrixFunction build_A(const ChainModel& model);

/// Reduced matrix on states 1..S after eliminating p_0: b_ij = a_ij - a_i0.
MatrixFunction build_B(const ChainModel& model);

/// All-ones upper triangular T and its inverse (1 on the diagonal, -1 above it).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> transform_T(int S);

/// B*(t) = T B(t) T^{-1}.
MatrixFunction build_Bstar(const ChainModel& model);

/// D M D^{-1} for any nonzero (possibly signed) weights.
MatrixFunction conjugate_by_weights(const MatrixFunction& m, const WeightVector& d);

/// B** = D B* D^{-1} for positive weights; signed or zero weights are rejected.
MatrixFunction weight_conjugate(const MatrixFunction& bstar, const WeightVector& d);

/// All off-diagonal entries >= -1e-12 at every grid node (one node if constant).
bool is_essentially_nonnegative(const MatrixFunction& m, const PeriodGrid& grid = {});

/// First offending off-diagonal (i, j, t, value) or nullopt.
struct OffDiagonalViolation {
  int row, col;
  double t, value;
};
std::optional<OffDiagonalViolation> find_negative_offdiagonal(const MatrixFunction& m,
                                                              const PeriodGrid& grid = {});

}  // namespace ctmc
