#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "toposnake/level_set.hpp"
#include "toposnake/metrics.hpp"

using namespace toposnake;
using namespace toposnake::testing;

namespace {
Mask disks(GridDims d, const std::vector<Circle>& cs) {
  Mask m(d);
  for (std::size_t i = 0; i < d.rows; ++i)
    for (std::size_t j = 0; j < d.cols; ++j)
      for (const auto& c : cs)
        if (circle_sdf(c, static_cast<double>(j), static_cast<double>(i)) <= 0.0) m(i, j) = 1;
  return m;
}

Mask square(GridDims d, std::size_t i0, std::size_t j0, std::size_t h, std::size_t w) {
  Mask m(d);
  for (std::size_t i = i0; i < i0 + h; ++i)
    for (std::size_t j = j0; j < j0 + w; ++j) m(i, j) = 1;
  return m;
}
}  // namespace

TEST(CountRegions, Disks) {
  EXPECT_EQ(count_regions(disks({40, 40}, {{20.0, 20.0, 8.0}})), 1);
  EXPECT_EQ(count_regions(disks({40, 60}, {{15.0, 20.0, 8.0}, {45.0, 20.0, 8.0}})), 2);
  EXPECT_EQ(count_regions(Mask({5, 5})), 0);
}

TEST(CountRegions, DiagonalTouchDependsOnConnectivity) {
  Mask m({4, 4});
  m(1, 1) = 1;
  m(2, 2) = 1;
  EXPECT_EQ(count_regions(m, 4), 2);
  EXPECT_EQ(count_regions(m, 8), 1);
  EXPECT_THROW(count_regions(m, 6), std::invalid_argument);
}

TEST(CountRegions, MatchesFloodFill) { EXPECT_EQ(count_regions_mismatches(50, 31), 0); }

TEST(Jaccard, Values) {
  const GridDims d{30, 30};
  const Mask a = square(d, 0, 0, 10, 10);
  EXPECT_EQ(jaccard(a, a), 1.0);
  EXPECT_EQ(jaccard(a, square(d, 15, 15, 10, 10)), 0.0);
  EXPECT_DOUBLE_EQ(jaccard(a, square(d, 0, 5, 10, 10)), 50.0 / 150.0);
  EXPECT_EQ(jaccard(Mask(d), Mask(d)), 1.0);
}

TEST(ZeroLevel, CircleLength) {
  const ScalarField phi = init_level_set(InitSpec::circle(16.0, 16.0, 8.0), {32, 32});
  const auto lines = extract_zero_level(phi);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_TRUE(lines[0].closed);
  EXPECT_NEAR(polyline_length(lines[0]), 2.0 * std::numbers::pi * 8.0, 0.05 * 2.0 * std::numbers::pi * 8.0);
}

TEST(ZeroLevel, NoCrossingIsEmpty) { EXPECT_TRUE(extract_zero_level(ScalarField({8, 8}, 1.0)).empty()); }

TEST(ZeroLevel, VerticesInterpolateToZero) {
  std::mt19937 rng(40);
  const ScalarField phi = random_field({20, 20}, rng);
  std::size_t seen = 0;
  for (const auto& line : extract_zero_level(phi)) {
    for (const auto& p : line.points) {
      const double fx = std::floor(p.x);
      const double fy = std::floor(p.y);
      const auto i = static_cast<std::size_t>(fy);
      const auto j = static_cast<std::size_t>(fx);
      double v = 0.0;
      if (p.y == fy) {
        const double t = p.x - fx;
        v = (1.0 - t) * phi(i, j) + t * phi(i, std::min<std::size_t>(j + 1, 19));
      } else {
        ASSERT_EQ(p.x, fx);
        const double t = p.y - fy;
        v = (1.0 - t) * phi(i, j) + t * phi(std::min<std::size_t>(i + 1, 19), j);
      }
      EXPECT_LE(std::abs(v), 1e-9);
      ++seen;
    }
  }
  EXPECT_GT(seen, 50u);
}

TEST(ZeroLevel, TwoCirclesGiveTwoClosedLines) {
  const ScalarField phi = init_level_set(InitSpec::union_of({{10.0, 10.0, 5.0}, {30.0, 10.0, 5.0}}), {20, 40});
  const auto lines = extract_zero_level(phi);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_TRUE(lines[0].closed && lines[1].closed);
}

TEST(Eikonal, DistanceFunctionHasSmallResidual) {
  const ScalarField phi = init_level_set(InitSpec::circle(16.0, 16.0, 8.0), {32, 32});
  EXPECT_LE(eikonal_median_residual(phi, 2.0), 0.02);
  EXPECT_THROW(eikonal_median_residual(ScalarField({8, 8}, 5.0), 2.0), std::invalid_argument);
}
