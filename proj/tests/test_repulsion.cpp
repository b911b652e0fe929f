#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "toposnake/repulsion.hpp"

using namespace toposnake;
using namespace toposnake::testing;

TEST(NonlocalVector, ZeroWGivesZero) {
  std::mt19937 rng(1);
  const ScalarField phi = random_field({7, 7}, rng);
  EXPECT_EQ(max_abs(nonlocal_vector(VectorField({7, 7}), phi, {}, {})), 0.0);
}

TEST(NonlocalVector, OutsideBandGivesZero) {
  std::mt19937 rng(2);
  const RegularizerParams regs;
  const ScalarField phi({7, 7}, regs.band_offset + 2.0 * regs.epsilon);
  EXPECT_EQ(max_abs(nonlocal_vector(random_vector_field({7, 7}, rng), phi, {}, regs)), 0.0);
}

TEST(NonlocalVector, SingleImpulseSpreadsGaussian) {
  const RegularizerParams regs;
  RepulsionParams rep;
  rep.scale = 1.0;
  rep.window_half = 1;
  VectorField w({3, 3});
  w.c1(1, 1) = 0.6;
  w.c2(1, 1) = -0.8;
  const ScalarField phi({3, 3}, 0.0);
  const VectorField v = nonlocal_vector(w, phi, rep, regs);
  const double h0 = narrow_band(0.0, regs);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double gk = std::exp(-static_cast<double>((i - 1) * (i - 1) + (j - 1) * (j - 1)));
      EXPECT_EQ(v.c1(i, j), gk * h0 * 0.6);
      EXPECT_EQ(v.c2(i, j), gk * h0 * -0.8);
    }
  }
}

TEST(NonlocalVector, MatchesBruteForceExactly) { EXPECT_EQ(nonlocal_mismatches(30, 17), 0u); }

TEST(NonlocalVector, RejectsBadWindow) {
  RepulsionParams rep;
  rep.window_half = 0;
  EXPECT_THROW(nonlocal_vector(VectorField({4, 4}), ScalarField({4, 4}), rep, {}), std::invalid_argument);
  rep = RepulsionParams{};
  rep.scale = 0.0;
  EXPECT_THROW(nonlocal_vector(VectorField({4, 4}), ScalarField({4, 4}), rep, {}), std::invalid_argument);
}

TEST(RepulsionForce, ZeroBetaGivesZero) {
  std::mt19937 rng(3);
  ScalarField phi;
  VectorField w;
  random_band_instance({8, 8}, rng, phi, w);
  const VectorField v = nonlocal_vector(w, phi, {}, {});
  EXPECT_EQ(max_abs(repulsion_force(phi, w, v, 0.0, {})), 0.0);
}

TEST(RepulsionForce, VanishesAtZeroLevelWhenOffsetEqualsEpsilon) {
  std::mt19937 rng(4);
  const RegularizerParams regs{1.0, 1.0};
  const ScalarField phi({8, 8}, 0.0);
  const VectorField w = random_vector_field({8, 8}, rng);
  const VectorField v = nonlocal_vector(w, phi, {}, regs);
  EXPECT_LE(max_abs(repulsion_force(phi, w, v, 0.3, regs)), 1e-15);
}

TEST(RepulsionForce, IsNegativeEnergyGradient) {
  const ForceCheck c = repulsion_force_fd(10, 21);
  EXPECT_GT(c.checked, 100u);
  EXPECT_LE(c.max_rel_error, 1e-3);
}

TEST(RepulsionSpeed, VanishesOutsideBandAndForZeroBeta) {
  std::mt19937 rng(5);
  const ScalarField far({9, 9}, 4.0);
  EXPECT_EQ(max_abs(repulsion_speed_gradient_form(far, 0.2, {}, {})), 0.0);
  const ScalarField phi = random_field({9, 9}, rng);
  EXPECT_EQ(max_abs(repulsion_speed_gradient_form(phi, 0.0, {}, {})), 0.0);
}
