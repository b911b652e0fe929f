#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "toposnake/grid.hpp"
#include "toposnake/level_set.hpp"
#include "toposnake/regularizers.hpp"

namespace toposnake {

inline constexpr double kSynthForeground = 0.2;
inline constexpr double kSynthBackground = 0.9;
inline constexpr double kSynthBlurSigma = 0.5;

/// Dark shapes on a light background, sampled at pixel centers and blurred.
/// `inside(x, y)` decides membership; the blur makes edges detectable.
template <class Inside>
ScalarField render_shapes(GridDims dims, Inside&& inside, bool blur = true) {
  ScalarField img(dims, kSynthBackground);
  for (std::size_t i = 0; i < dims.rows; ++i) {
    for (std::size_t j = 0; j < dims.cols; ++j) {
      if (inside(static_cast<double>(j), static_cast<double>(i))) img(i, j) = kSynthForeground;
    }
  }
  if (!blur) return img;
  return gaussian_blur(img, kSynthBlurSigma, static_cast<int>(std::ceil(3.0 * kSynthBlurSigma)));
}

inline ScalarField synth_disks(GridDims dims, const std::vector<Circle>& disks, bool blur = true) {
  return render_shapes(
      dims,
      [&](double x, double y) {
        return std::any_of(disks.begin(), disks.end(),
                           [&](const Circle& c) { return circle_sdf(c, x, y) <= 0.0; });
      },
      blur);
}

/// Default two-circles layout on 128 x 128: radius 22, 8-pixel gap, row 64.
inline std::vector<Circle> two_circles_layout() { return {{38.0, 64.0, 22.0}, {90.0, 64.0, 22.0}}; }

/// Single contour enclosing both disks of the default layout.
inline InitSpec two_circles_init() { return InitSpec::circle(64.0, 64.0, 57.0); }

inline ScalarField synth_two_circles(GridDims dims = {128, 128},
                                     const std::vector<Circle>& disks = two_circles_layout(),
                                     bool blur = true) {
  return synth_disks(dims, disks, blur);
}

/// Palm plus four fingers separated by narrow gaps, on 128 x 128.
struct HandLayout {
  Rectangle palm{30.0, 66.0, 98.0, 112.0};
  std::vector<Rectangle> fingers{
      {30.0, 22.0, 43.0, 70.0}, {48.0, 16.0, 61.0, 70.0}, {66.0, 18.0, 79.0, 70.0}, {84.0, 28.0, 97.0, 70.0}};
};

inline ScalarField synth_hand(GridDims dims = {128, 128}, const HandLayout& layout = {}, bool blur = true) {
  return render_shapes(
      dims,
      [&](double x, double y) {
        if (rectangle_sdf(layout.palm, x, y) <= 0.0) return true;
        return std::any_of(layout.fingers.begin(), layout.fingers.end(), [&](const Rectangle& r) {
          // fingertips rounded with radius half the finger width
          const double rad = 0.5 * (r.x1 - r.x0);
          const Rectangle core{r.x0 + rad, r.y0 + rad, r.x1 - rad, r.y1};
          return rectangle_sdf(core, x, y) <= rad;
        });
      },
      blur);
}

/// Scattered disks, some nearly touching, on 128 x 128.
inline std::vector<Circle> blobs_layout() {
  return {{28.0, 28.0, 11.0}, {52.0, 30.0, 10.0}, {92.0, 26.0, 12.0}, {30.0, 70.0, 12.0},
          {56.0, 66.0, 9.0},  {90.0, 64.0, 13.0}, {36.0, 102.0, 10.0}, {62.0, 100.0, 11.0},
          {96.0, 100.0, 12.0}};
}

inline ScalarField synth_blobs(GridDims dims = {128, 128}, bool blur = true) {
  return synth_disks(dims, blobs_layout(), blur);
}

}  // namespace toposnake
