#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "ctmc/errors.hpp"
#include "ctmc/matrices.hpp"
#include "ctmc/reference_models.hpp"
#include "ctmc/weights.hpp"

using namespace ctmc;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<ChainModel> random_corpus(std::mt19937& rng, int S) {
  return {oracle::random_periodic_birth_death(rng, S), oracle::random_batch_arrival(rng, S),
          oracle::random_batch_service(rng, S, false), oracle::random_batch_both(rng, S)};
}

}  // namespace

TEST_CASE("A for a two-state chain") {
  const ChainModel m = birth_death_chain({2}, {3});
  Eigen::Matrix2d expect;
  expect << -2, 3, 2, -3;
  CHECK(max_abs(build_A(m)(0.3) - expect) == 0.0);
  CHECK(max_abs(build_B(m)(0.3) - Eigen::MatrixXd::Constant(1, 1, -5.0)) == 0.0);
}

TEST_CASE("A equals the transposed generator and has zero column sums") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int S = 1; S <= 6; ++S) {
    for (const auto& m : random_corpus(rng, S)) {
      const MatrixFunction A = build_A(m);
      for (int i = 0; i < 20; ++i) {
        const double t = u(rng);
        const Eigen::MatrixXd At = A(t);
        CHECK(max_abs(At - oracle::generator(m, t).transpose()) <= 1e-12);
        CHECK(At.colwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("full-batch service enters A as a_0S") {
  const ChainModel m = pure_batch_service_chain(2, 1.0, 0.7);
  const Eigen::MatrixXd A = build_A(m)(0.0);
  CHECK(A(0, 2) == doctest::Approx(0.7));
  CHECK(A(0, 1) == 0.0);
}

TEST_CASE("B subtracts the first column of A") {
  std::mt19937 rng(5);
  const ChainModel m = oracle::random_batch_both(rng, 4);
  const Eigen::MatrixXd A = build_A(m)(0.41), B = build_B(m)(0.41);
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) CHECK(B(i - 1, j - 1) == doctest::Approx(A(i, j) - A(i, 0)).epsilon(1e-14));

  // Only state 1 is reachable from 0: rows 2..S of B are those of the principal submatrix.
  const ChainModel bd = oracle::random_birth_death(rng, 4);
  const Eigen::MatrixXd Abd = build_A(bd)(0.0), Bbd = build_B(bd)(0.0);
  const Eigen::MatrixXd sub = Abd.bottomRightCorner(4, 4);
  CHECK(max_abs(Bbd.bottomRows(3) - sub.bottomRows(3)) == 0.0);
  CHECK(max_abs(Bbd.row(0) - (sub.row(0).array() - Abd(1, 0)).matrix()) <= 1e-14);
}

TEST_CASE("transform T") {
  auto [T, Ti] = transform_T(2);
  Eigen::Matrix2d t, ti;
  t << 1, 1, 0, 1;
  ti << 1, -1, 0, 1;
  CHECK(max_abs(T - t) == 0.0);
  CHECK(max_abs(Ti - ti) == 0.0);
  auto [T3, T3i] = transform_T(3);
  CHECK(max_abs(T3 * T3i - Eigen::MatrixXd::Identity(3, 3)) == 0.0);
}

TEST_CASE("B* matches the closed forms of every class") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int S = 2; S <= 8; ++S) {
    for (const auto& m : random_corpus(rng, S)) {
      const MatrixFunction Bs = build_Bstar(m);
      for (int i = 0; i < 5; ++i) {
        const double t = u(rng);
        CHECK(max_abs(Bs(t) - oracle::bstar_closed_form(m, t)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("B* two-state displays") {
  SUBCASE("birth-death") {
    const ChainModel m = birth_death_chain({1.5, 2.5}, {3.5, 4.5});
    Eigen::Matrix2d e;
    e << -(1.5 + 3.5), 3.5, 2.5, -(2.5 + 4.5);
    CHECK(max_abs(build_Bstar(m)(0.0) - e) <= 1e-14);
  }
  SUBCASE("batch arrival") {
    ChainModel m;
    m.kind = ChainClass::BatchArrival;
    m.S = 2;
    const double a1 = 1.1, a2 = 0.3, mu1 = 2.0, mu2 = 5.0;
    m.arrival_batch = {{1, a1}, {2, a2}};
    m.death = {{1, mu1}, {2, mu2}};
    const double a11 = -(a1 + mu1), a22 = -mu2;
    Eigen::Matrix2d e;
    e << a11 - a2, mu1, a1 - a2, a22 - a1;
    CHECK(max_abs(build_Bstar(m)(0.0) - e) <= 1e-14);
  }
  SUBCASE("batch service") {
    ChainModel m;
    m.kind = ChainClass::BatchService;
    m.S = 2;
    const double l0 = 1.1, l1 = 0.3, b1 = 2.0, b2 = 5.0;
    m.birth = {{0, l0}, {1, l1}};
    m.service_batch = {{1, b1}, {2, b2}};
    Eigen::Matrix2d e;
    e << -(l0 + b1), b1 - b2, l1, -(l1 + b1 + b2);
    CHECK(max_abs(build_Bstar(m)(0.0) - e) <= 1e-14);
  }
}

TEST_CASE("birth-death B* is tridiagonal") {
  std::mt19937 rng(23);
  const ChainModel m = oracle::random_periodic_birth_death(rng, 7);
  const Eigen::MatrixXd B = build_Bstar(m)(0.77);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      if (std::abs(i - j) > 1) CHECK(B(i, j) == 0.0);
}

TEST_CASE("weight conjugation") {
  std::mt19937 rng(29);
  const ChainModel m = oracle::random_batch_both(rng, 4);
  const MatrixFunction Bs = build_Bstar(m);
  CHECK(max_abs(weight_conjugate(Bs, WeightVector::unit(4))(0.2) - Bs(0.2)) <= 1e-15);

  // Symmetrizing weights for a homogeneous birth-death chain.
  const ChainModel bd = oracle::random_birth_death(rng, 6);
  std::vector<double> d{1.0};
  for (int k = 1; k < 6; ++k) d.push_back(d.back() * std::sqrt(bd.death_rate(k)(0) / bd.birth_rate(k)(0)));
  const Eigen::MatrixXd Bss = weight_conjugate(build_Bstar(bd), WeightVector::from_values(d))(0.0);
  CHECK(max_abs(Bss - Bss.transpose()) <= 1e-10);

  const double signed_d[] = {1.0, -2.0, 3.0, 0.5};
  CHECK_THROWS(weight_conjugate(Bs, WeightVector::from_values(signed_d)));
  const Eigen::MatrixXd D = Eigen::Vector4d(1.0, -2.0, 3.0, 0.5).asDiagonal();
  CHECK(max_abs(conjugate_by_weights(Bs, WeightVector::from_values(signed_d))(0.6) - D * Bs(0.6) * D.inverse()) <=
        1e-12);
}

TEST_CASE("weights survive huge geometric spreads") {
  std::vector<double> logs;
  for (int i = 0; i < 200; ++i) logs.push_back(i * std::log(90.0));
  const WeightVector d = WeightVector::from_log(logs, std::vector<int>(200, 1));
  CHECK(d.log_spread() == doctest::Approx(199 * std::log(90.0)));
  CHECK(d.ratio(150, 149) == doctest::Approx(90.0));
}

TEST_CASE("essential nonnegativity by class") {
  std::mt19937 rng(31);
  CHECK(is_essentially_nonnegative(build_Bstar(oracle::random_periodic_birth_death(rng, 6))));

  ChainModel inc;
  inc.kind = ChainClass::BatchArrival;
  inc.S = 3;
  inc.arrival_batch = {{1, 1.0}, {2, 2.0}, {3, 3.0}};
  inc.death = {{1, 1.0}, {2, 1.0}, {3, 1.0}};
  CHECK_FALSE(is_essentially_nonnegative(build_Bstar(inc)));
  CHECK(find_negative_offdiagonal(build_Bstar(inc)).has_value());

  CHECK(is_essentially_nonnegative(build_Bstar(oracle::random_batch_service(rng, 6, true))));
}
