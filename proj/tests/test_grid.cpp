#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "toposnake/grid.hpp"

using namespace toposnake;
using toposnake::testing::random_field;
using toposnake::testing::random_vector_field;

TEST(GradientForward, ConstantFieldIsZero) {
  ScalarField f({3, 3}, 5.0);
  const VectorField g = gradient_forward(f);
  EXPECT_EQ(max_abs(g), 0.0);
}

TEST(GradientForward, RowRampHasUnitSlopeExceptLastRow) {
  ScalarField f({5, 4});
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) f(i, j) = static_cast<double>(i);
  const VectorField g = gradient_forward(f);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(g.c1(i, j), i + 1 < 5 ? 1.0 : 0.0);
      EXPECT_EQ(g.c2(i, j), 0.0);
    }
  }
}

TEST(GradientForward, NegativeAdjointOfDivergence) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const ScalarField phi = random_field({4, 4}, rng);
    const VectorField v = random_vector_field({4, 4}, rng);
    const VectorField g = gradient_forward(phi);
    const ScalarField d = divergence_backward(v);
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
      lhs += g.c1[k] * v.c1[k] + g.c2[k] * v.c2[k];
      rhs += phi[k] * d[k];
    }
    EXPECT_NEAR(lhs, -rhs, 1e-14);
  }
}

TEST(GradientForward, AdjointOnNonSquareGrids) {
  std::mt19937 rng(11);
  const ScalarField phi = random_field({7, 13}, rng);
  const VectorField v = random_vector_field({7, 13}, rng);
  EXPECT_NEAR(inner_product(gradient_forward(phi), v), -inner_product(phi, divergence_backward(v)), 1e-12);
}

TEST(DivergenceBackward, ZeroFieldIsZero) {
  VectorField v({4, 5});
  EXPECT_EQ(max_abs(divergence_backward(v)), 0.0);
}

TEST(DivergenceBackward, GradientOfRampIsDivergenceFreeInside) {
  ScalarField f({6, 6});
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) f(i, j) = static_cast<double>(i);
  const ScalarField d = divergence_backward(gradient_forward(f));
  for (std::size_t i = 1; i + 1 < 6; ++i)
    for (std::size_t j = 1; j + 1 < 6; ++j) EXPECT_EQ(d(i, j), 0.0);
}

TEST(DivergenceBackward, OfGradientEqualsLaplacianEverywhere) {
  std::mt19937 rng(3);
  const ScalarField phi = random_field({4, 4}, rng);
  const ScalarField a = divergence_backward(gradient_forward(phi));
  const ScalarField b = laplacian(phi);
  for (std::size_t k = 0; k < phi.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-15);
}

TEST(Laplacian, ConstantIsZero) {
  ScalarField f({5, 5}, -2.5);
  EXPECT_EQ(max_abs(laplacian(f)), 0.0);
}

TEST(Laplacian, QuadraticHasSecondDifferenceTwo) {
  ScalarField f({6, 6});
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) f(i, j) = static_cast<double>(i * i);
  const ScalarField l = laplacian(f);
  for (std::size_t i = 1; i + 1 < 6; ++i)
    for (std::size_t j = 1; j + 1 < 6; ++j) EXPECT_EQ(l(i, j), 2.0);
}

TEST(Laplacian, MatchesCompositionOnInterior) {
  std::mt19937 rng(5);
  const ScalarField phi = random_field({6, 6}, rng);
  const ScalarField a = divergence_backward(gradient_forward(phi));
  const ScalarField b = laplacian(phi);
  for (std::size_t i = 1; i + 1 < 6; ++i)
    for (std::size_t j = 1; j + 1 < 6; ++j) EXPECT_NEAR(a(i, j), b(i, j), 1e-15);
}

TEST(Field, DimensionMismatchThrows) {
  ScalarField a({3, 3});
  ScalarField b({3, 4});
  EXPECT_THROW(l2_distance(a, b), std::invalid_argument);
}

TEST(Field, ZeroSizeRejected) { EXPECT_THROW(GridDims(0, 3), std::invalid_argument); }

TEST(Field, NonFiniteInputRejected) {
  ScalarField a({2, 2});
  a[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(gradient_forward(a), std::domain_error);
}
