#include <doctest.h>

#include <cmath>
#include <random>

#include "fpdot/densities.hpp"
#include "fpdot/divergence.hpp"
#include "fpdot/numeric.hpp"
#include "test_support.hpp"

using namespace fpdot;
using testsup::close;

TEST_CASE("divergence of a density from itself is zero") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix p = testsup::random_density_matrix(2 + trial % 3, 2 + trial % 4, rng);
    KlResult kl = kl_divergence(p, p);
    CHECK(kl.absolutely_continuous);
    CHECK(kl.value == 0.0);
  }
}

TEST_CASE("divergence from uniform over a half-support plan is log 2") {
  Matrix p = Matrix::from_rows({{0.5, 0.5}, {0.0, 0.0}});
  Matrix q(2, 2, 0.25);
  KlResult kl = kl_divergence(p, q);
  CHECK(kl.absolutely_continuous);
  CHECK(close(kl.value, 0.6931471805599453, 1e-12));
}

TEST_CASE("mass outside the support of q gives an infinite divergence") {
  Matrix p = Matrix::from_rows({{0.5, 0.5}, {0.0, 0.0}});
  Matrix q = Matrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
  KlResult kl = kl_divergence(p, q);
  CHECK_FALSE(kl.absolutely_continuous);
  CHECK(kl.value == kPosInf);
}

TEST_CASE("divergence input validation") {
  Matrix p(2, 2, 0.25);
  CHECK_THROWS_AS(kl_divergence(p, Matrix(3, 2, 1.0 / 6.0)), DimensionMismatch);
  CHECK_THROWS_AS(kl_divergence(Matrix(2, 2, 0.4), p), NotADensity);
  CHECK_THROWS_AS(kl_divergence(p, Matrix(2, 2, 0.4)), NotADensity);
}

TEST_CASE("divergence is nonnegative and vanishes only at equality") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix p = testsup::random_density_matrix(3, 3, rng);
    Matrix q = testsup::random_density_matrix(3, 3, rng);
    KlResult kl = kl_divergence(p, q);
    REQUIRE(kl.absolutely_continuous);
    CHECK(kl.value >= 0.0);
    if (kl.value == 0.0) {
      CHECK(max_abs_difference(p, q) <= 1e-12);
    }
    if (max_abs_difference(p, q) <= 1e-12) {
      CHECK(kl.value <= 1e-12);
    }
  }
}

TEST_CASE("divergence is jointly convex") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    Matrix p1 = testsup::random_density_matrix(2, 3, rng);
    Matrix q1 = testsup::random_density_matrix(2, 3, rng);
    Matrix p2 = testsup::random_density_matrix(2, 3, rng);
    Matrix q2 = testsup::random_density_matrix(2, 3, rng);
    double t = uniform01(rng);

    Matrix pm(2, 3, 0.0);
    Matrix qm(2, 3, 0.0);
    for (std::size_t k = 0; k < pm.size(); ++k) {
      pm.flat()[k] = t * p1.flat()[k] + (1.0 - t) * p2.flat()[k];
      qm.flat()[k] = t * q1.flat()[k] + (1.0 - t) * q2.flat()[k];
    }

    double mixed = kl_divergence(pm, qm).value;
    double bound = t * kl_divergence(p1, q1).value +
                   (1.0 - t) * kl_divergence(p2, q2).value;
    CHECK(mixed <= bound + 1e-10);
  }
}

TEST_CASE("objective decomposition on a uniform plan with zero cost") {
  TransportPlan plan(Matrix(2, 2, 0.25));
  CostMatrix cost(Matrix(2, 2, 0.0));
  ObjectiveDecomposition obj =
      regularized_objective(plan, cost, 1.0, ReferenceDensity::uniform());
  CHECK(obj.transport_cost == 0.0);
  CHECK(obj.kl_term == 0.0);
  CHECK(obj.total == 0.0);
}

TEST_CASE("objective decomposition on a product plan with identity cost") {
  DiscreteDensity half({0.5, 0.5});
  TransportPlan plan(testsup::outer_product(half, half));
  CostMatrix cost(Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
  ObjectiveDecomposition obj = regularized_objective(
      plan, cost, 1.0, ReferenceDensity::product_of_marginals(half, half));
  CHECK(close(obj.transport_cost, 0.5, 1e-15));
  CHECK(obj.kl_term == 0.0);
  CHECK(close(obj.total, 0.5, 1e-15));
}

TEST_CASE("objective rejects plans outside the reference support") {
  TransportPlan plan(Matrix(2, 2, 0.25));
  Matrix ref = Matrix::from_rows({{0.5, 0.5}, {0.0, 0.0}});
  CostMatrix cost(Matrix(2, 2, 0.0));
  CHECK_THROWS_AS(
      regularized_objective(plan, cost, 1.0, ReferenceDensity::explicit_matrix(ref)),
      Infeasible);
}

TEST_CASE("objective validates epsilon and shapes") {
  TransportPlan plan(Matrix(2, 2, 0.25));
  CostMatrix cost(Matrix(2, 2, 0.0));
  CHECK_THROWS_AS(regularized_objective(plan, cost, 0.0, ReferenceDensity::uniform()),
                  EpsilonNotPositive);
  CHECK_THROWS_AS(regularized_objective(plan, cost, -1.0, ReferenceDensity::uniform()),
                  EpsilonNotPositive);
  CHECK_THROWS_AS(
      regularized_objective(plan, CostMatrix(Matrix(2, 3, 0.0)), 1.0,
                            ReferenceDensity::uniform()),
      DimensionMismatch);
}

TEST_CASE("objective pieces recombine exactly as reported") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix p = testsup::random_density_matrix(3, 4, rng);
    TransportPlan plan(p);
    CostMatrix cost(testsup::random_cost(3, 4, rng));
    double epsilon = std::pow(10.0, -1.0 + 2.0 * uniform01(rng));
    ObjectiveDecomposition obj =
        regularized_objective(plan, cost, epsilon, ReferenceDensity::uniform());
    CHECK(obj.total == obj.transport_cost + epsilon * obj.kl_term);
    CHECK(close(obj.kl_term,
                kl_divergence(p, ReferenceDensity::uniform().materialize(3, 4)).value,
                1e-15));
  }
}
