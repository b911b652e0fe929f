#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "toposnake/grid.hpp"
#include "toposnake/regularizers.hpp"

namespace toposnake {

/// Non-local repulsion geometry: Gaussian nearness scale d and the half-width
/// of the square summation window (window_half = 2 is a 5x5 window). The
/// weight beta lives in EnergyWeights.
struct RepulsionParams {
  double scale = 5.0;
  int window_half = 2;

  void validate() const {
    if (!(scale > 0.0)) throw std::invalid_argument("repulsion scale d must be positive");
    if (window_half < 1) throw std::invalid_argument("repulsion window_half must be >= 1");
  }

  /// Gaussian weights exp(-(p^2 + q^2) / d^2), row-major over the window.
  [[nodiscard]] std::vector<double> window_weights() const {
    const int r = window_half;
    std::vector<double> wts;
    wts.reserve(static_cast<std::size_t>((2 * r + 1) * (2 * r + 1)));
    for (int p = -r; p <= r; ++p) {
      for (int q = -r; q <= r; ++q) wts.push_back(std::exp(-(p * p + q * q) / (scale * scale)));
    }
    return wts;
  }
};

/// Windowed sum v(x) = sum_y G(x - y) w(y) h(phi(y)). Neighbours outside the
/// grid contribute nothing. `band` must hold h(phi) on entry; it is scratch
/// space owned by the caller so the solver can reuse a buffer.
inline void nonlocal_vector_from_band(const VectorField& w, const ScalarField& band,
                                      const RepulsionParams& rep, VectorField& out) {
  const auto m = static_cast<long>(w.dims().rows);
  const auto n = static_cast<long>(w.dims().cols);
  const int r = rep.window_half;
  const auto wts = rep.window_weights();
  parallel_rows(static_cast<std::size_t>(m), [&](std::size_t ui) {
    const auto i = static_cast<long>(ui);
    // cnt[x] = band pixels in column x within rows i-r..i+r; a zero window sum skips the pixel
    std::vector<int> cnt(static_cast<std::size_t>(n), 0);
    for (int p = -r; p <= r; ++p) {
      const long y = i + p;
      if (y < 0 || y >= m) continue;
      for (long x = 0; x < n; ++x) cnt[static_cast<std::size_t>(x)] += band[static_cast<std::size_t>(y * n + x)] != 0.0;
    }
    int live = 0;
    for (long x = 0; x < std::min<long>(r, n); ++x) live += cnt[static_cast<std::size_t>(x)];
    for (long j = 0; j < n; ++j) {
      if (j + r < n) live += cnt[static_cast<std::size_t>(j + r)];
      if (j - r - 1 >= 0) live -= cnt[static_cast<std::size_t>(j - r - 1)];
      const auto kx = static_cast<std::size_t>(i * n + j);
      if (live == 0) {
        out.c1[kx] = 0.0;
        out.c2[kx] = 0.0;
        continue;
      }
      double s1 = 0.0;
      double s2 = 0.0;
      std::size_t t = 0;
      for (int p = -r; p <= r; ++p) {
        const long y = i + p;
        if (y < 0 || y >= m) {
          t += static_cast<std::size_t>(2 * r + 1);
          continue;
        }
        for (int q = -r; q <= r; ++q, ++t) {
          const long x = j + q;
          if (x < 0 || x >= n) continue;
          const auto k = static_cast<std::size_t>(y * n + x);
          if (band[k] == 0.0) continue;
          const double hw = wts[t] * band[k];
          s1 += hw * w.c1[k];
          s2 += hw * w.c2[k];
        }
      }
      out.c1[kx] = s1;
      out.c2[kx] = s2;
    }
  });
}

/// Fills `band` with h(phi) and `out` with the windowed repulsion vector.
inline void nonlocal_vector_into(const VectorField& w, const ScalarField& phi,
                                 const RepulsionParams& rep, const RegularizerParams& regs,
                                 ScalarField& band, VectorField& out) {
  for (std::size_t k = 0; k < phi.size(); ++k) band[k] = narrow_band(phi[k], regs);
  nonlocal_vector_from_band(w, band, rep, out);
}

inline VectorField nonlocal_vector(const VectorField& w, const ScalarField& phi,
                                   const RepulsionParams& rep, const RegularizerParams& regs) {
  require_same_dims(w.dims(), phi.dims(), "nonlocal_vector");
  rep.validate();
  regs.validate();
  ScalarField band(phi.dims());
  VectorField out(phi.dims());
  nonlocal_vector_into(w, phi, rep, regs, band, out);
  return out;
}

/// Pointwise 2 beta h'(phi) (w . v): the descent direction of beta * E_r with
/// respect to phi when w is held fixed.
inline double repulsion_force_at(double phi, double w1, double w2, double v1, double v2,
                                 double beta, const RegularizerParams& regs) {
  if (beta == 0.0) return 0.0;
  return 2.0 * beta * narrow_band_prime(phi, regs) * (w1 * v1 + w2 * v2);
}

inline ScalarField repulsion_force(const ScalarField& phi, const VectorField& w,
                                   const VectorField& v, double beta,
                                   const RegularizerParams& regs) {
  require_same_dims(phi.dims(), w.dims(), "repulsion_force");
  require_same_dims(phi.dims(), v.dims(), "repulsion_force");
  ScalarField out(phi.dims());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    out[k] = repulsion_force_at(phi[k], w.c1[k], w.c2[k], v.c1[k], v.c2[k], beta, regs);
  }
  return out;
}

/// Original-model repulsion speed used by the AOS baseline:
/// (4 beta / d^2) h(phi(x)) sum_y G(x - y) ((x - y) . grad phi(y)) h(phi(y)),
/// with central differences for grad phi.
inline ScalarField repulsion_speed_gradient_form(const ScalarField& phi, double beta,
                                                 const RepulsionParams& rep,
                                                 const RegularizerParams& regs) {
  rep.validate();
  const auto m = static_cast<long>(phi.rows());
  const auto n = static_cast<long>(phi.cols());
  const int r = rep.window_half;
  const auto wts = rep.window_weights();
  ScalarField band(phi.dims());
  ScalarField gx(phi.dims());
  ScalarField gy(phi.dims());
  for (std::size_t i = 0; i < phi.rows(); ++i) {
    for (std::size_t j = 0; j < phi.cols(); ++j) {
      band(i, j) = narrow_band(phi(i, j), regs);
      const double up = phi(i > 0 ? i - 1 : i, j);
      const double down = phi(i + 1 < phi.rows() ? i + 1 : i, j);
      const double left = phi(i, j > 0 ? j - 1 : j);
      const double right = phi(i, j + 1 < phi.cols() ? j + 1 : j);
      gx(i, j) = 0.5 * (down - up);
      gy(i, j) = 0.5 * (right - left);
    }
  }
  const double coeff = 4.0 * beta / (rep.scale * rep.scale);
  ScalarField out(phi.dims());
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < n; ++j) {
      const auto kx = static_cast<std::size_t>(i * n + j);
      if (band[kx] == 0.0) continue;
      double s = 0.0;
      std::size_t t = 0;
      for (int p = -r; p <= r; ++p) {
        for (int q = -r; q <= r; ++q, ++t) {
          const long y = i + p;
          const long x = j + q;
          if (y < 0 || y >= m || x < 0 || x >= n) continue;
          const auto ky = static_cast<std::size_t>(y * n + x);
          // x - y = (-p, -q)
          s += wts[t] * (-p * gx[ky] - q * gy[ky]) * band[ky];
        }
      }
      out[kx] = coeff * band[kx] * s;
    }
  }
  return out;
}

}  // namespace toposnake
