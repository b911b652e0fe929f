#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "toposnake/grid.hpp"

namespace toposnake {

/// {phi < 0}.
inline Mask inside_mask(const ScalarField& phi) {
  Mask m(phi.dims());
  for (std::size_t k = 0; k < phi.size(); ++k) m[k] = phi[k] < 0.0 ? 1 : 0;
  return m;
}

inline Mask complement(const Mask& a) {
  Mask m(a.dims());
  for (std::size_t k = 0; k < a.size(); ++k) m[k] = a[k] != 0 ? 0 : 1;
  return m;
}

/// Connected components of the nonzero pixels; connectivity is 4 or 8.
inline int count_regions(const Mask& mask, int connectivity = 4) {
  if (connectivity != 4 && connectivity != 8) throw std::invalid_argument("connectivity must be 4 or 8");
  const auto m = static_cast<long>(mask.rows());
  const auto n = static_cast<long>(mask.cols());
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<long> stack;
  int regions = 0;
  for (long start = 0; start < m * n; ++start) {
    if (mask[static_cast<std::size_t>(start)] == 0 || seen[static_cast<std::size_t>(start)] != 0) continue;
    ++regions;
    seen[static_cast<std::size_t>(start)] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const long k = stack.back();
      stack.pop_back();
      const long i = k / n;
      const long j = k % n;
      for (long di = -1; di <= 1; ++di) {
        for (long dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (connectivity == 4 && di != 0 && dj != 0) continue;
          const long y = i + di;
          const long x = j + dj;
          if (y < 0 || y >= m || x < 0 || x >= n) continue;
          const auto q = static_cast<std::size_t>(y * n + x);
          if (mask[q] == 0 || seen[q] != 0) continue;
          seen[q] = 1;
          stack.push_back(y * n + x);
        }
      }
    }
  }
  return regions;
}

/// |a & b| / |a | b|, 1 when both are empty.
inline double jaccard(const Mask& a, const Mask& b) {
  require_same_dims(a.dims(), b.dims(), "jaccard");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const bool x = a[k] != 0;
    const bool y = b[k] != 0;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// (x, y) = (column, row).
struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Polyline {
  std::vector<Point> points;
  bool closed = false;
};

inline double polyline_length(const Polyline& p) {
  double s = 0.0;
  for (std::size_t k = 1; k < p.points.size(); ++k) {
    s += std::hypot(p.points[k].x - p.points[k - 1].x, p.points[k].y - p.points[k - 1].y);
  }
  if (p.closed && p.points.size() > 1) {
    s += std::hypot(p.points.front().x - p.points.back().x, p.points.front().y - p.points.back().y);
  }
  return s;
}

/// Marching squares on the zero level with linear interpolation along cell
/// edges. Segments are chained into polylines; contours reaching the frame
/// come out open. Saddle cells are resolved by the cell-center average.
inline std::vector<Polyline> extract_zero_level(const ScalarField& phi) {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  // Edge ids: horizontal edge (i, j)-(i, j+1) -> 2 * (i * n + j); vertical (i, j)-(i+1, j) -> +1.
  auto h_edge = [n](std::size_t i, std::size_t j) { return 2 * (i * n + j); };
  auto v_edge = [n](std::size_t i, std::size_t j) { return 2 * (i * n + j) + 1; };
  auto point_on = [&](std::size_t e) {
    const std::size_t cell = e / 2;
    const std::size_t i = cell / n;
    const std::size_t j = cell % n;
    const double a = phi(i, j);
    if (e % 2 == 0) {
      const double b = phi(i, j + 1);
      const double t = a / (a - b);
      return Point{static_cast<double>(j) + t, static_cast<double>(i)};
    }
    const double b = phi(i + 1, j);
    const double t = a / (a - b);
    return Point{static_cast<double>(j), static_cast<double>(i) + t};
  };
  auto neg = [&](std::size_t i, std::size_t j) { return phi(i, j) < 0.0; };

  std::map<std::size_t, std::vector<std::size_t>> adj;
  auto link = [&](std::size_t a, std::size_t b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (std::size_t i = 0; i + 1 < m; ++i) {
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const bool c0 = neg(i, j);
      const bool c1 = neg(i, j + 1);
      const bool c2 = neg(i + 1, j + 1);
      const bool c3 = neg(i + 1, j);
      const std::array<std::size_t, 4> edges{h_edge(i, j), v_edge(i, j + 1), h_edge(i + 1, j), v_edge(i, j)};
      // crossing on edge e between corners e and e+1 (mod 4)
      const std::array<bool, 4> corner{c0, c1, c2, c3};
      std::vector<std::size_t> cut;
      for (int e = 0; e < 4; ++e) {
        if (corner[static_cast<std::size_t>(e)] != corner[static_cast<std::size_t>((e + 1) % 4)]) {
          cut.push_back(edges[static_cast<std::size_t>(e)]);
        }
      }
      if (cut.size() == 2) {
        link(cut[0], cut[1]);
      } else if (cut.size() == 4) {
        const double center = 0.25 * (phi(i, j) + phi(i, j + 1) + phi(i + 1, j + 1) + phi(i + 1, j));
        // cut order: top, right, bottom, left. Pair so that the center's side stays connected.
        if ((center < 0.0) == c0) {
          link(cut[0], cut[1]);
          link(cut[2], cut[3]);
        } else {
          link(cut[0], cut[3]);
          link(cut[1], cut[2]);
        }
      }
    }
  }

  std::vector<Polyline> out;
  std::map<std::size_t, bool> used;
  auto walk = [&](std::size_t start, Polyline& pl) {
    std::size_t prev = start;
    std::size_t cur = start;
    used[start] = true;
    pl.points.push_back(point_on(start));
    while (true) {
      std::size_t next = cur;
      for (std::size_t nb : adj[cur]) {
        if (nb != prev && !used[nb]) {
          next = nb;
          break;
        }
      }
      if (next == cur) {
        for (std::size_t nb : adj[cur]) {
          if (nb == start && cur != start && pl.points.size() > 2) pl.closed = true;
        }
        break;
      }
      used[next] = true;
      pl.points.push_back(point_on(next));
      prev = cur;
      cur = next;
    }
  };
  // Open chains first, starting from their endpoints.
  for (const auto& [e, nbs] : adj) {
    if (nbs.size() == 1 && !used[e]) {
      Polyline pl;
      walk(e, pl);
      out.push_back(std::move(pl));
    }
  }
  for (const auto& [e, nbs] : adj) {
    if (!used[e]) {
      Polyline pl;
      walk(e, pl);
      out.push_back(std::move(pl));
    }
  }
  return out;
}

/// Median of | |grad phi| - 1 | (central differences) over {|phi| < band}.
inline double eikonal_median_residual(const ScalarField& phi, double band) {
  std::vector<double> r;
  for (std::size_t i = 0; i < phi.rows(); ++i) {
    for (std::size_t j = 0; j < phi.cols(); ++j) {
      if (std::abs(phi(i, j)) < band) r.push_back(std::abs(central_gradient_magnitude_at(phi, i, j) - 1.0));
    }
  }
  if (r.empty()) throw std::invalid_argument("band is empty");
  const auto mid = r.begin() + static_cast<long>(r.size() / 2);
  std::nth_element(r.begin(), mid, r.end());
  double med = *mid;
  if (r.size() % 2 == 0) med = 0.5 * (med + *std::max_element(r.begin(), mid));
  return med;
}

}  // namespace toposnake
