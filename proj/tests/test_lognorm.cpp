#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "ctmc/errors.hpp"
#include "ctmc/lognorm.hpp"
#include "ctmc/matrices.hpp"
#include "ctmc/reference_models.hpp"

using namespace ctmc;

TEST_CASE("log_norm") {
  Eigen::Matrix2d m;
  m << -2, 1, 1, -2;
  CHECK(log_norm(m) == -1.0);
  CHECK(log_norm(Eigen::MatrixXd::Constant(1, 1, 4.5)) == 4.5);

  std::mt19937 rng(1);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd M(5, 5);
    for (int i = 0; i < 25; ++i) M(i) = n(rng);
    const double h = 1e-7;
    const Eigen::MatrixXd E = Eigen::MatrixXd::Identity(5, 5) + h * M;
    const double fd = (E.cwiseAbs().colwise().sum().maxCoeff() - 1.0) / h;
    CHECK(std::abs(fd - log_norm(M)) <= 1e-5);
  }
}

TEST_CASE("log_norm of essentially nonnegative matrices is the max column sum") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0), d(-5.0, 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd M(4, 4);
    for (int i = 0; i < 16; ++i) M(i) = u(rng);
    for (int i = 0; i < 4; ++i) M(i, i) = d(rng);
    CHECK(log_norm(M) == doctest::Approx(M.colwise().sum().maxCoeff()).epsilon(1e-14));
  }
}

TEST_CASE("alpha functions of the unit-rate two-state chain") {
  const ChainModel m = birth_death_chain({1, 1}, {1, 1});
  const RatePair r = alpha_functions(build_Bstar(m));
  CHECK(r.per_state[0](0.0) == 1.0);
  CHECK(r.per_state[1](0.0) == 1.0);
  CHECK(r.alpha.mean() == 1.0);
  CHECK(r.beta.mean() == 1.0);

  const BoundCertificate c = ergodicity_bound(m, WeightVector::unit(2));
  CHECK(c.rate.mean() == 1.0);
  CHECK(c.constant == 1.0);
  CHECK(c.norm == Norm::L1);
}

TEST_CASE("alpha <= each alpha_i <= beta, and -log_norm(B**) = alpha") {
  std::mt19937 rng(4);
  const PeriodGrid grid{201};
  for (int trial = 0; trial < 10; ++trial) {
    const ChainModel m = oracle::random_periodic_birth_death(rng, 5);
    const MatrixFunction B = build_Bstar(m);
    const RatePair r = alpha_functions(B, grid);
    const auto a = r.alpha.on_grid(grid), b = r.beta.on_grid(grid);
    for (int k = 0; k < grid.points; ++k) {
      const double t = grid.node(k);
      CHECK(a[k] <= b[k]);
      for (const auto& f : r.per_state) {
        CHECK(a[k] <= f(t) + 1e-12);
        CHECK(f(t) <= b[k] + 1e-12);
      }
      CHECK(std::abs(-log_norm(B(t)) - a[k]) <= 1e-10);
    }
  }
}

TEST_CASE("ergodicity_bound refuses sign-indefinite B*") {
  ChainModel inc;
  inc.kind = ChainClass::BatchArrival;
  inc.S = 3;
  inc.arrival_batch = {{1, 1.0}, {2, 2.0}, {3, 3.0}};
  inc.death = {{1, 1.0}, {2, 1.0}, {3, 1.0}};
  CHECK_THROWS_AS(ergodicity_bound(inc, WeightVector::unit(3)), Refusal);
  CHECK_THROWS_AS(ergodicity_bound(pure_batch_service_chain(5, 1.0, 1.0), WeightVector::unit(5)), Refusal);
}

TEST_CASE("decay parameter weights") {
  const DecayWeights one = decay_parameter_weights(Eigen::MatrixXd::Constant(1, 1, -5.0));
  CHECK(one.alpha_star == doctest::Approx(5.0));
  CHECK(one.weights.value(0) == 1.0);

  Eigen::Matrix2d m;
  m << -2, 1, 1, -2;
  const DecayWeights two = decay_parameter_weights(m);
  CHECK(two.alpha_star == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(two.weights.value(1) == doctest::Approx(1.0).epsilon(1e-10));

  std::mt19937 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const ChainModel bd = oracle::random_birth_death(rng, 6);
    const Eigen::MatrixXd B = build_Bstar(bd)(0.0);
    const DecayWeights w = decay_parameter_weights(B);
    CHECK(std::abs(w.alpha_star - oracle::decay_from_eig(B)) <= 1e-8);
    const Eigen::MatrixXd Bss = weight_conjugate(build_Bstar(bd), w.weights)(0.0);
    const Eigen::VectorXd cols = Bss.colwise().sum().transpose();
    CHECK(cols.maxCoeff() - cols.minCoeff() <= 1e-9);
  }
}

TEST_CASE("decay parameter certificate is sharp") {
  std::mt19937 rng(8);
  const ChainModel bd = oracle::random_birth_death(rng, 5);
  const BoundCertificate c = decay_parameter_bound(bd);
  CHECK(c.sharp);
  CHECK(c.rate.mean() == doctest::Approx(oracle::decay_from_eig(build_Bstar(bd)(0.0))).epsilon(1e-9));
  CHECK(c.lower_rate.has_value());
}

TEST_CASE("plain-norm factor is a valid conversion") {
  std::mt19937 rng(9);
  std::normal_distribution<double> n;
  const double vals[] = {1.0, 3.0, 0.2, 7.0};
  const WeightVector d = WeightVector::from_values(vals);
  const auto [T, Ti] = transform_T(4);
  const Eigen::MatrixXd D = Eigen::Vector4d(1.0, 3.0, 0.2, 7.0).asDiagonal();
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd y1(4), y2(4);
    for (int i = 0; i < 4; ++i) y1(i) = n(rng), y2(i) = n(rng);
    const double ratio_w = (D * T * y1).lpNorm<1>() / (D * T * y2).lpNorm<1>();
    const double ratio_y = y1.lpNorm<1>() / y2.lpNorm<1>();
    CHECK(std::log(ratio_y) <= log_plain_factor_l1(d) + std::log(ratio_w) + 1e-12);
  }
}
