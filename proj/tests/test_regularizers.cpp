#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "toposnake/regularizers.hpp"

using namespace toposnake;

TEST(Heaviside, Values) {
  EXPECT_DOUBLE_EQ(heaviside_eps(0.0, 1.0), 0.5);
  EXPECT_EQ(heaviside_eps(2.0, 1.0), 1.0);
  EXPECT_EQ(heaviside_eps(-2.0, 1.0), 0.0);
  EXPECT_NEAR(heaviside_eps(0.5, 1.0), 0.75 + 1.0 / (2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(heaviside_eps(0.5, 1.0), 0.90915, 1e-5);
}

TEST(Heaviside, RejectsNonPositiveEpsilon) {
  EXPECT_THROW(heaviside_eps(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(dirac_eps(0.0, -1.0), std::invalid_argument);
}

TEST(Dirac, Values) {
  EXPECT_NEAR(dirac_eps(1.0, 1.0), 0.0, 1e-16);
  EXPECT_NEAR(dirac_eps(-1.0, 1.0), 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(dirac_eps(0.0, 1.0), 1.0);
}

TEST(Dirac, IntegratesToOne) {
  for (double eps : {1.0, 0.5, 2.0}) {
    const double h = 0.001;
    const int n = static_cast<int>(std::round(2.0 * eps / h));
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double x = -eps + k * h;
      s += (k == 0 || k == n ? 0.5 : 1.0) * dirac_eps(x, eps);
    }
    EXPECT_NEAR(s * h, 1.0, 1e-6);
  }
}

TEST(Dirac, IsDerivativeOfHeaviside) {
  const double h = 1e-6;
  for (double x : {-0.9, -0.3, 0.0, 0.4, 0.8}) {
    const double fd = (heaviside_eps(x + h, 1.0) - heaviside_eps(x - h, 1.0)) / (2.0 * h);
    EXPECT_NEAR(fd, dirac_eps(x, 1.0), 1e-8);
  }
}

TEST(DiracPrime, Values) {
  EXPECT_EQ(dirac_eps_prime(0.0, 1.0), 0.0);
  EXPECT_NEAR(dirac_eps_prime(0.5, 1.0), -std::numbers::pi / 2.0, 1e-15);
  EXPECT_EQ(dirac_eps_prime(1.5, 1.0), 0.0);
}

TEST(DiracPrime, MatchesFiniteDifference) {
  const double h = 1e-5;
  const double fd = (dirac_eps(0.3 + h, 1.0) - dirac_eps(0.3 - h, 1.0)) / (2.0 * h);
  EXPECT_NEAR(fd, dirac_eps_prime(0.3, 1.0), 1e-6 * std::abs(fd));
}

TEST(NarrowBand, Values) {
  const RegularizerParams p{1.0, 1.0};
  EXPECT_DOUBLE_EQ(narrow_band(0.0, p), 1.0);
  EXPECT_EQ(narrow_band(3.0, p), 0.0);
  EXPECT_EQ(narrow_band(-3.0, p), 0.0);
  for (double x : {0.1, 0.7, 1.3, 1.9, 2.5}) EXPECT_NEAR(narrow_band(x, p), narrow_band(-x, p), 1e-15);
}

TEST(NarrowBandPrime, Values) {
  const RegularizerParams p{1.0, 1.0};
  EXPECT_NEAR(narrow_band_prime(0.0, p), 0.0, 1e-16);
  EXPECT_EQ(narrow_band_prime(2.0, p), 0.0);
  EXPECT_EQ(narrow_band_prime(-2.5, p), 0.0);
}

TEST(NarrowBandPrime, MatchesFiniteDifference) {
  const double h = 1e-5;
  for (const RegularizerParams p : {RegularizerParams{1.0, 1.0}, RegularizerParams{0.5, 2.0}}) {
    for (double x : {0.7, -0.7, 1.2, 2.1}) {
      const double fd = (narrow_band(x + h, p) - narrow_band(x - h, p)) / (2.0 * h);
      const double an = narrow_band_prime(x, p);
      if (std::abs(fd) < 1e-8) {
        EXPECT_NEAR(an, fd, 1e-8);
      } else {
        EXPECT_NEAR(an, fd, 1e-5 * std::abs(fd));
      }
    }
  }
}

TEST(EdgeDetector, ConstantImageGivesOne) {
  const ScalarField f({10, 12}, 0.4);
  const ScalarField g = edge_detector(f, {});
  for (double v : g.values()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(EdgeDetector, UnitGradientGivesHalf) {
  // A linear ramp is unchanged by the (normalized, replicated) blur away from the
  // frame, so the smoothed gradient is exactly 1 at the centre.
  ScalarField f({21, 21});
  for (std::size_t i = 0; i < 21; ++i)
    for (std::size_t j = 0; j < 21; ++j) f(i, j) = static_cast<double>(j);
  EdgeParams p;
  p.rho = 1.0;
  p.power = 2;
  const ScalarField g = edge_detector(f, p);
  EXPECT_NEAR(g(10, 10), 0.5, 1e-12);
}

TEST(EdgeDetector, StepMinimumOnStepAndMonotoneAway) {
  ScalarField f({16, 16});
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) f(i, j) = j < 8 ? 0.0 : 1.0;
  EdgeParams p;
  p.sigma = 1.0;
  const ScalarField g = edge_detector(f, p);
  const std::size_t row = 8;
  std::size_t arg = 0;
  for (std::size_t j = 1; j < 16; ++j)
    if (g(row, j) < g(row, arg)) arg = j;
  // the step lies between columns 7 and 8; central differences put the minimum on either
  EXPECT_TRUE(arg == 7 || arg == 8) << arg;
  for (std::size_t j = arg + 1; j + 1 < 16; ++j) EXPECT_LE(g(row, j), g(row, j + 1));
  for (std::size_t j = arg; j >= 1; --j) EXPECT_LE(g(row, j), g(row, j - 1));
  for (std::size_t i = 0; i < 16; ++i) EXPECT_DOUBLE_EQ(g(i, 4), g(row, 4));
}

TEST(EdgeDetector, ValuesInUnitRange) {
  ScalarField f({9, 9});
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>((k * 37) % 11) / 10.0;
  EXPECT_TRUE(is_unit_range(edge_detector(f, {})));
}

TEST(EdgeDetector, RejectsBadParameters) {
  const ScalarField f({5, 5}, 0.0);
  EdgeParams p;
  p.rho = -1.0;
  EXPECT_THROW(edge_detector(f, p), std::invalid_argument);
  p = EdgeParams{};
  p.power = 3;
  EXPECT_THROW(edge_detector(f, p), std::invalid_argument);
}
