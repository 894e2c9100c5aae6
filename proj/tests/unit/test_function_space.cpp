#include "function_space.hpp"
#include "oracles.hpp"
#include "rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace rcar;

namespace {

FieldVector random_field(std::size_t n, RngStream &rng, double scale = 1.0) {
  FieldVector u(n);
  for (std::size_t j = 0; j < n; ++j)
    u[j] = scale * rng.normal();
  return u;
}

} // namespace

TEST(FunctionSpace, NormOfZeroIsZero) { EXPECT_EQ(h1_norm(FieldVector::zero(16)), 0.0); }

TEST(FunctionSpace, NormOfUnitVectorIsOne) {
  for (std::size_t j = 0; j < 16; ++j)
    EXPECT_DOUBLE_EQ(h1_norm(FieldVector::unit(16, j)), 1.0);
}

TEST(FunctionSpace, NormThreeFour) { EXPECT_DOUBLE_EQ(h1_norm(FieldVector{3.0, 4.0}), 5.0); }

TEST(FunctionSpace, NonFiniteCoefficientsRejected) {
  FieldVector u{1.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(require_finite(u), InvalidInput);
  FieldVector w{std::numeric_limits<double>::infinity(), 0.0};
  EXPECT_THROW(require_finite(w), InvalidInput);
  EXPECT_THROW(evaluate_at(BasisSpec(2), u, 0.3), InvalidInput);
}

TEST(FunctionSpace, ProjectionAtFullResolutionIsIdentity) {
  RngStream rng(11, 0);
  const FieldVector u = random_field(32, rng);
  EXPECT_EQ(project(u, 32), u);
  EXPECT_EQ(project(u, 100), u);
}

TEST(FunctionSpace, ProjectionOfZeroAndIdempotence) {
  EXPECT_EQ(project(FieldVector::zero(8), 3), FieldVector::zero(8));
  RngStream rng(12, 0);
  const FieldVector u = random_field(32, rng);
  const FieldVector p = project(u, 7);
  EXPECT_EQ(project(p, 7), p);
  for (std::size_t j = 7; j < 32; ++j)
    EXPECT_EQ(p[j], 0.0);
}

TEST(FunctionSpace, EvaluateZeroField) { EXPECT_EQ(evaluate_at(BasisSpec(9), FieldVector::zero(9), 1.234), 0.0); }

TEST(FunctionSpace, ConstantModeValue) {
  // The constant with unit H^1 norm is (2 pi)^{-1/2}.
  const double expected = 2.5 / std::sqrt(2.0 * std::numbers::pi);
  EXPECT_NEAR(evaluate_at(BasisSpec(5), 2.5 * FieldVector::unit(5, 0), 4.0), expected, 1e-15);
}

TEST(FunctionSpace, CosineModeMatchesClosedForm) {
  const BasisSpec b(7);
  // mode 3 is cos(2x); H^1 norm^2 of cos(kx) is pi (1 + k^2)
  const double amp = 1.0 / std::sqrt(std::numbers::pi * 5.0);
  for (double x : {0.0, 0.7, 2.9, 5.5})
    EXPECT_NEAR(evaluate_at(b, FieldVector::unit(7, 3), x), amp * std::cos(2.0 * x), 1e-15);
  EXPECT_NEAR(evaluate_at(b, FieldVector::unit(7, 4), 0.9), amp * std::sin(2.0 * 0.9), 1e-15);
}

TEST(FunctionSpace, EvaluationIsPeriodic) {
  RngStream rng(13, 0);
  const BasisSpec b(21);
  const FieldVector u = random_field(21, rng);
  for (double x : {0.1, 1.0, 3.0})
    EXPECT_NEAR(evaluate_at(b, u, x), evaluate_at(b, u, x + 2.0 * std::numbers::pi), 1e-12);
}

TEST(FunctionSpace, BasisFunctionsHaveUnitH1NormByQuadrature) {
  const BasisSpec b(64);
  for (std::size_t j = 0; j < b.n_modes(); ++j) {
    const double q = oracle::simpson(
        [&](double x) {
          const double v = b.basis_value(j, x), d = b.basis_derivative(j, x);
          return v * v + d * d;
        },
        0.0, 2.0 * std::numbers::pi, 4096);
    EXPECT_NEAR(q, 1.0, 1e-6) << "mode " << j;
  }
}

TEST(FunctionSpace, BasisIsH1OrthogonalByQuadrature) {
  const BasisSpec b(9);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = i + 1; j < 9; ++j) {
      const double q = oracle::simpson(
          [&](double x) {
            return b.basis_value(i, x) * b.basis_value(j, x) + b.basis_derivative(i, x) * b.basis_derivative(j, x);
          },
          0.0, 2.0 * std::numbers::pi, 2048);
      EXPECT_NEAR(q, 0.0, 1e-9);
    }
}

TEST(FunctionSpace, DerivativeMatchesFiniteDifference) {
  const BasisSpec b(11);
  const double h = 1e-6;
  for (std::size_t j = 0; j < 11; ++j)
    for (double x : {0.3, 2.0, 4.4})
      EXPECT_NEAR(b.basis_derivative(j, x), (b.basis_value(j, x + h) - b.basis_value(j, x - h)) / (2 * h), 1e-7);
}

TEST(FunctionSpace, EigenvaluesAndFrequencies) {
  const BasisSpec b(6);
  EXPECT_EQ(b.frequency(0), 0);
  EXPECT_EQ(b.frequency(1), 1);
  EXPECT_EQ(b.frequency(2), 1);
  EXPECT_EQ(b.frequency(5), 3);
  EXPECT_EQ(b.kind(0), ModeKind::Constant);
  EXPECT_EQ(b.kind(3), ModeKind::Cosine);
  EXPECT_EQ(b.kind(4), ModeKind::Sine);
  EXPECT_DOUBLE_EQ(b.eigenvalue(0), 1.0);
  EXPECT_DOUBLE_EQ(b.eigenvalue(3), 0.2);
}

TEST(FunctionSpace, EvaluationMatrixMatchesPointwise) {
  RngStream rng(14, 0);
  const BasisSpec b(17);
  const FieldVector u = random_field(17, rng);
  const std::vector<double> xs{0.0, 0.5, 1.7, 6.0};
  const Eigen::VectorXd m = evaluation_matrix(b, xs) * u.coeffs();
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_NEAR(m[static_cast<Eigen::Index>(i)], evaluate_at(b, u, xs[i]), 1e-13);
}

TEST(FunctionSpace, ProjectionIsContractive) {
  RngStream rng(15, 0);
  for (int t = 0; t < 10000; ++t) {
    const FieldVector u = random_field(24, rng, 3.0);
    const std::size_t m = static_cast<std::size_t>(rng.next_u64() % 25);
    EXPECT_LE(h1_norm(project(u, m)), h1_norm(u));
  }
}

TEST(FunctionSpace, TriangleInequalityOnRandomPairs) {
  RngStream rng(16, 0);
  int violations = 0;
  for (int t = 0; t < 100000; ++t) {
    const FieldVector u = random_field(8, rng), v = random_field(8, rng);
    if (h1_norm(u + v) > h1_norm(u) + h1_norm(v) + 1e-12)
      ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(FunctionSpace, DistanceMatchesNormOfDifference) {
  RngStream rng(17, 0);
  const FieldVector u = random_field(30, rng), v = random_field(30, rng);
  EXPECT_NEAR(h1_distance(u, v), h1_norm(u - v), 1e-13);
  EXPECT_THROW(h1_distance(u, FieldVector::zero(3)), InvalidInput);
}

TEST(FunctionSpace, ArithmeticSizeMismatchRejected) {
  FieldVector a(3), b(4);
  EXPECT_THROW(a += b, InvalidInput);
}
