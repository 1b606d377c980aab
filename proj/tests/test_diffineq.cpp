#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "ctmc/diffineq.hpp"
#include "ctmc/errors.hpp"
#include "ctmc/lognorm.hpp"
#include "ctmc/matrices.hpp"
#include "ctmc/reference_models.hpp"

using namespace ctmc;

namespace {

void check_values(const WeightVector& d, const std::vector<double>& expect) {
  REQUIRE(d.size() == static_cast<int>(expect.size()));
  for (int i = 0; i < d.size(); ++i) CHECK(d.value(i) == doctest::Approx(expect[i]).epsilon(1e-14));
}

}  // namespace

TEST_CASE("sign patterns") {
  const SignPattern p({1, 1, -1, -1, 1});
  CHECK(p.to_string() == "++--+");
  CHECK(p.change_points() == std::vector<int>{2, 4});  // first index of each new block
  CHECK_THROWS(SignPattern({1, 0, 1}));
  CHECK(SignPattern::from_index(0, 4) == SignPattern::all_positive(4));
  CHECK(SignPattern::from_index(0b101, 4).to_string() == "+--+");
}

TEST_CASE("template weights") {
  const double e = 0.3;
  check_values(template_weights(SignPattern::all_positive(3), e), {e, e * e, e * e * e});
  check_values(template_weights(SignPattern({1, 1, -1, -1}), e), {std::pow(e, 3), std::pow(e, 4), -e, -e * e});
  // Two changes, S=5, k=1, s=3: blocks [1], [2,3], [4,5].
  check_values(template_weights(SignPattern({1, -1, -1, 1, 1}), e),
               {std::pow(e, 5), -std::pow(e, 3), -std::pow(e, 4), e, e * e});
  check_values(template_weights(SignPattern::all_positive(4), 1.0), {1, 1, 1, 1});
  CHECK_THROWS(template_weights(SignPattern::all_positive(3), 0.0));
  CHECK_THROWS(template_weights(SignPattern::all_positive(3), 1.5));
}

TEST_CASE("pattern alpha satisfies the column-sum inequality") {
  std::mt19937 rng(21);
  const PeriodGrid grid{101};
  for (int trial = 0; trial < 5; ++trial) {
    const ChainModel m = oracle::random_batch_both(rng, 4);
    const MatrixFunction B = build_Bstar(m);
    for (unsigned long idx = 0; idx < 8; ++idx) {
      const WeightVector d = template_weights(SignPattern::from_index(idx, 4), 0.6);
      const PatternBound pb = pattern_alpha(B, d, grid);
      const auto a = pb.alpha_D.on_grid(grid);
      const MatrixFunction tilde = conjugate_by_weights(B, d);
      for (int k = 0; k < grid.points; ++k) {
        const Eigen::VectorXd cols = tilde(grid.node(k)).colwise().sum().transpose();
        CHECK(cols.maxCoeff() <= -a[k] + 1e-12);
      }
    }
  }
}

TEST_CASE("unit all-positive template reproduces the log-norm alpha") {
  std::mt19937 rng(22);
  const PeriodGrid grid{401};
  for (int trial = 0; trial < 6; ++trial) {
    const ChainModel m =
        trial % 2 ? oracle::random_batch_service(rng, 5, true) : oracle::random_periodic_birth_death(rng, 5);
    const MatrixFunction B = build_Bstar(m);
    const auto ad = pattern_alpha(B, WeightVector::unit(5), grid).alpha_D.on_grid(grid);
    const auto al = alpha_functions(B, grid).alpha.on_grid(grid);
    for (int k = 0; k < grid.points; ++k) CHECK(std::abs(ad[k] - al[k]) <= 1e-10);
  }
}

TEST_CASE("pure batch service: no pattern beats lambda (1 - eps) from below") {
  const double lambda = 1.0, eps = 0.5;
  const ChainModel m = pure_batch_service_chain(5, lambda, 0.1);
  const MatrixFunction B = build_Bstar(m);
  for (unsigned long idx = 0; idx < 16; ++idx) {
    const SignPattern p = SignPattern::from_index(idx, 5);
    const PatternBound pb = pattern_alpha(B, template_weights(p, eps));
    if (p.change_points().size() <= 1)
      CHECK(pb.alpha_D.mean() == doctest::Approx(lambda * (1 - eps)).epsilon(1e-12));
    else
      CHECK(pb.alpha_D.mean() >= lambda * (1 - eps) - 1e-12);
  }
}

TEST_CASE("batch_service_bound") {
  const BoundCertificate c = batch_service_bound(pure_batch_service_chain(4, 1.0, 1.0), 0.5);
  CHECK(c.rate.mean() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c.constant == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(c.norm == Norm::L1);

  const ChainModel e2 = bulk_service_example();
  const BoundCertificate c2 = batch_service_bound(e2, 0.5);
  CHECK(c2.rate.mean() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(c2.constant == doctest::Approx(std::pow(2.0, 39)).epsilon(1e-12));

  CHECK_THROWS_AS(batch_service_bound(birth_death_chain({1, 1, 1}, {1, 1, 1}), 0.5), Refusal);
}

TEST_CASE("assemble_certificate") {
  CHECK(assemble_certificate(RateProfile::exact(1.0), 0.5, 5).constant == doctest::Approx(16.0));
  CHECK(assemble_certificate(RateProfile::exact(1.0), 1.0, 5).constant == 1.0);
}

TEST_CASE("exhaustive search") {
  const ChainModel one = birth_death_chain({2}, {3});
  const ExhaustiveResult r1 = exhaustive_alpha(build_Bstar(one), {0.5, 1.0});
  CHECK(r1.alpha_star.mean() == doctest::Approx(5.0));
  CHECK(r1.per_pattern.size() == 1);

  for (int S = 2; S <= 6; ++S) {
    const ExhaustiveResult r = exhaustive_alpha(build_Bstar(pure_batch_service_chain(S, 1.0, 0.1)), {0.5});
    CHECK(std::abs(r.alpha_star.mean() - 0.5) <= 1e-12);
    CHECK(r.per_pattern.size() == (1u << (S - 1)));
    for (const auto& pb : r.per_pattern) CHECK(pb.alpha_D.mean() >= 0.5 - 1e-12);
  }

  // With decreasing service intensities the unit template is never worse than log-norm.
  std::mt19937 rng(24);
  const PeriodGrid grid{201};
  const ChainModel m = oracle::random_batch_service(rng, 4, true);
  const ExhaustiveResult r = exhaustive_alpha(build_Bstar(m), {0.5, 1.0}, grid);
  const auto unit_pattern = r.per_pattern.front().alpha_D.on_grid(grid);
  const auto lognorm_alpha = alpha_functions(build_Bstar(m), grid).alpha.on_grid(grid);
  CHECK(r.per_pattern.front().pattern == SignPattern::all_positive(4));
  for (int k = 0; k < grid.points; ++k) CHECK(unit_pattern[k] >= lognorm_alpha[k] - 1e-10);

  CHECK_THROWS_AS(exhaustive_alpha(build_Bstar(pure_batch_service_chain(kMaxExhaustiveS + 1, 1.0, 0.1)), {0.5}),
                  Refusal);
}

TEST_CASE("for large eps the last column binds below lambda (1 - eps)") {
  const int S = 10;
  const double lambda = 1.0, b = 1.0, eps = 0.9;
  const ChainModel m = pure_batch_service_chain(S, lambda, b);
  const BoundCertificate c = batch_service_bound(m, eps);
  double geometric = 0.0;
  for (int j = 1; j < S; ++j) geometric += std::pow(eps, j);
  const double expect = std::min(lambda * (1 - eps), lambda + b * (1 - geometric));
  CHECK(expect < lambda * (1 - eps));
  CHECK(c.rate.mean() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(c.details["last_column_binding"].get<bool>());
  // lambda (1 - eps) itself would be unsound only if it exceeded the spectral rate; the
  // returned rate never does.
  CHECK(c.rate.mean() <= oracle::decay_from_eig(build_Bstar(m)(0.0)) + 1e-9);
}
