#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "toposnake/grid.hpp"

namespace toposnake {

/// x is the column coordinate, y the row coordinate, both in pixels.
struct Circle {
  double cx = 0.0;
  double cy = 0.0;
  double r = 1.0;
};

struct Rectangle {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;
};

enum class InitKind { circle, rectangle, union_of_circles, threshold };

struct InitSpec {
  InitKind kind = InitKind::circle;
  std::vector<Circle> circles;
  Rectangle rect;
  double threshold = 0.5;

  static InitSpec circle(double cx, double cy, double r) {
    InitSpec s;
    s.kind = InitKind::circle;
    s.circles = {{cx, cy, r}};
    return s;
  }
  static InitSpec rectangle(Rectangle r) {
    InitSpec s;
    s.kind = InitKind::rectangle;
    s.rect = r;
    return s;
  }
  static InitSpec union_of(std::vector<Circle> cs) {
    InitSpec s;
    s.kind = InitKind::union_of_circles;
    s.circles = std::move(cs);
    return s;
  }
  static InitSpec thresholded(double t) {
    InitSpec s;
    s.kind = InitKind::threshold;
    s.threshold = t;
    return s;
  }

  /// Throws std::invalid_argument if the geometry leaves the image or is degenerate.
  void validate(const GridDims& dims) const {
    const double w = static_cast<double>(dims.cols);
    const double h = static_cast<double>(dims.rows);
    auto inside = [&](double x, double y) { return x >= 0.0 && y >= 0.0 && x <= w - 1 && y <= h - 1; };
    switch (kind) {
      case InitKind::circle:
      case InitKind::union_of_circles:
        if (circles.empty() || (kind == InitKind::circle && circles.size() != 1)) {
          throw std::invalid_argument("circle init needs exactly one circle, union at least one");
        }
        for (const auto& c : circles) {
          if (!(c.r > 0.0)) throw std::invalid_argument("circle radius must be positive");
          if (!inside(c.cx - c.r, c.cy - c.r) || !inside(c.cx + c.r, c.cy + c.r)) {
            throw std::invalid_argument("circle leaves the image");
          }
        }
        break;
      case InitKind::rectangle:
        if (!(rect.x1 > rect.x0) || !(rect.y1 > rect.y0)) throw std::invalid_argument("empty rectangle");
        if (!inside(rect.x0, rect.y0) || !inside(rect.x1, rect.y1)) {
          throw std::invalid_argument("rectangle leaves the image");
        }
        break;
      case InitKind::threshold:
        if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
        break;
    }
  }
};

/// Squared 1D distance transform of a sampled function (lower envelope of parabolas).
inline void distance_transform_1d(const std::vector<double>& f, std::vector<double>& d) {
  const std::size_t n = f.size();
  d.assign(n, 0.0);
  std::vector<std::size_t> v(n);
  std::vector<double> z(n + 1);
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  std::size_t first = n;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] < inf) {
      first = q;
      break;
    }
  }
  if (first == n) {
    d.assign(n, inf);
    return;
  }
  v[0] = first;
  z[0] = -inf;
  z[1] = inf;
  for (std::size_t q = first + 1; q < n; ++q) {
    if (f[q] == inf) continue;
    const auto dq = static_cast<double>(q);
    double s = 0.0;
    while (true) {
      const auto dv = static_cast<double>(v[k]);
      s = ((f[q] + dq * dq) - (f[v[k]] + dv * dv)) / (2.0 * dq - 2.0 * dv);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const auto dq = static_cast<double>(q);
    while (z[k + 1] < dq) ++k;
    const auto dv = static_cast<double>(v[k]);
    d[q] = (dq - dv) * (dq - dv) + f[v[k]];
  }
}

/// Exact Euclidean distance from every pixel to the nearest pixel where `seed` is set.
inline ScalarField euclidean_distance(const Mask& seed) {
  const std::size_t m = seed.rows();
  const std::size_t n = seed.cols();
  constexpr double inf = std::numeric_limits<double>::infinity();
  ScalarField sq(seed.dims(), inf);
  std::vector<double> f;
  std::vector<double> d;
  f.resize(m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) f[i] = seed(i, j) != 0 ? 0.0 : inf;
    distance_transform_1d(f, d);
    for (std::size_t i = 0; i < m; ++i) sq(i, j) = d[i];
  }
  f.resize(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) f[j] = sq(i, j);
    distance_transform_1d(f, d);
    for (std::size_t j = 0; j < n; ++j) sq(i, j) = std::sqrt(d[j]);
  }
  return sq;
}

/// Signed distance of a binary mask, negative inside. The contour is placed
/// half a pixel beyond the outermost foreground pixel centers.
inline ScalarField signed_distance(const Mask& inside) {
  std::size_t count = 0;
  for (auto v : inside.values()) count += v != 0 ? 1 : 0;
  if (count == 0 || count == inside.size()) {
    throw std::invalid_argument("mask is empty or full; no contour exists");
  }
  Mask outside(inside.dims());
  for (std::size_t k = 0; k < inside.size(); ++k) outside[k] = inside[k] != 0 ? 0 : 1;
  const ScalarField to_in = euclidean_distance(inside);
  const ScalarField to_out = euclidean_distance(outside);
  ScalarField phi(inside.dims());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    phi[k] = inside[k] != 0 ? -(to_out[k] - 0.5) : to_in[k] - 0.5;
  }
  return phi;
}

inline double circle_sdf(const Circle& c, double x, double y) {
  return std::hypot(x - c.cx, y - c.cy) - c.r;
}

inline double rectangle_sdf(const Rectangle& r, double x, double y) {
  const double cx = 0.5 * (r.x0 + r.x1);
  const double cy = 0.5 * (r.y0 + r.y1);
  const double qx = std::abs(x - cx) - 0.5 * (r.x1 - r.x0);
  const double qy = std::abs(y - cy) - 0.5 * (r.y1 - r.y0);
  const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
  return outside + std::min(std::max(qx, qy), 0.0);
}

inline Mask threshold_mask(const ScalarField& image, double t) {
  Mask m(image.dims());
  for (std::size_t k = 0; k < image.size(); ++k) m[k] = image[k] < t ? 1 : 0;
  return m;
}

/// Initial level set. For `threshold`, pixels darker than t are inside, so the
/// image is required.
inline ScalarField init_level_set(const InitSpec& spec, const GridDims& dims,
                                  const ScalarField* image = nullptr) {
  spec.validate(dims);
  ScalarField phi(dims);
  switch (spec.kind) {
    case InitKind::circle:
    case InitKind::union_of_circles:
      for (std::size_t i = 0; i < dims.rows; ++i) {
        for (std::size_t j = 0; j < dims.cols; ++j) {
          double v = std::numeric_limits<double>::infinity();
          for (const auto& c : spec.circles) {
            v = std::min(v, circle_sdf(c, static_cast<double>(j), static_cast<double>(i)));
          }
          phi(i, j) = v;
        }
      }
      break;
    case InitKind::rectangle:
      for (std::size_t i = 0; i < dims.rows; ++i) {
        for (std::size_t j = 0; j < dims.cols; ++j) {
          phi(i, j) = rectangle_sdf(spec.rect, static_cast<double>(j), static_cast<double>(i));
        }
      }
      break;
    case InitKind::threshold:
      if (image == nullptr) throw std::invalid_argument("threshold init needs the image");
      require_same_dims(image->dims(), dims, "init_level_set");
      phi = signed_distance(threshold_mask(*image, spec.threshold));
      break;
  }
  return phi;
}

}  // namespace toposnake
