#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "toposnake/grid.hpp"

namespace toposnake {

/// Smoothing half-width and narrow-band offset, both in pixels.
struct RegularizerParams {
  double epsilon = 1.0;
  double band_offset = 1.0;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(band_offset > 0.0)) throw std::invalid_argument("band_offset must be positive");
  }
  /// |phi| beyond which the narrow band and its derivative vanish.
  [[nodiscard]] double band_support() const noexcept { return band_offset + epsilon; }
};

namespace detail {
inline void check_epsilon(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
}
}  // namespace detail

// The regularized Heaviside family is compactly supported: outside |phi| <= eps
// the values are exactly 0 or 1, not merely small.

inline double heaviside_eps(double phi, double eps) {
  detail::check_epsilon(eps);
  if (phi > eps) return 1.0;
  if (phi < -eps) return 0.0;
  const double x = phi / eps;
  return 0.5 * (1.0 + x + std::sin(std::numbers::pi * x) / std::numbers::pi);
}

inline double dirac_eps(double phi, double eps) {
  detail::check_epsilon(eps);
  if (std::abs(phi) > eps) return 0.0;
  return (1.0 + std::cos(std::numbers::pi * phi / eps)) / (2.0 * eps);
}

inline double dirac_eps_prime(double phi, double eps) {
  detail::check_epsilon(eps);
  if (std::abs(phi) > eps) return 0.0;
  return -std::numbers::pi / (2.0 * eps * eps) * std::sin(std::numbers::pi * phi / eps);
}

/// Smoothed indicator of {|phi| < l}: H(phi + l) (1 - H(phi - l)).
inline double narrow_band(double phi, const RegularizerParams& p) {
  const double l = p.band_offset;
  return heaviside_eps(phi + l, p.epsilon) * (1.0 - heaviside_eps(phi - l, p.epsilon));
}

inline double narrow_band_prime(double phi, const RegularizerParams& p) {
  const double l = p.band_offset;
  const double e = p.epsilon;
  return dirac_eps(phi + l, e) * (1.0 - heaviside_eps(phi - l, e)) -
         heaviside_eps(phi + l, e) * dirac_eps(phi - l, e);
}

inline ScalarField narrow_band(const ScalarField& phi, const RegularizerParams& p) {
  p.validate();
  ScalarField out(phi.dims());
  for (std::size_t k = 0; k < phi.size(); ++k) out[k] = narrow_band(phi[k], p);
  return out;
}

/// Edge indicator g = 1 / (1 + rho |grad(G_sigma * f)|^s).
struct EdgeParams {
  double rho = 10000.0;
  double sigma = 1.0;
  int power = 2;
  /// 0 selects ceil(3 sigma).
  int kernel_radius = 0;

  [[nodiscard]] int effective_radius() const {
    return kernel_radius > 0 ? kernel_radius : static_cast<int>(std::ceil(3.0 * sigma));
  }
  void validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("edge rho must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("edge sigma must be positive");
    if (power != 1 && power != 2) throw std::invalid_argument("edge power must be 1 or 2");
    if (effective_radius() < static_cast<int>(std::ceil(3.0 * sigma))) {
      throw std::invalid_argument("edge kernel radius must be at least ceil(3 sigma)");
    }
  }
};

/// Normalized, truncated 1D Gaussian of the given radius.
inline std::vector<double> gaussian_kernel(double sigma, int radius) {
  std::vector<double> k(2 * static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    const double v = std::exp(-0.5 * t * t / (sigma * sigma));
    k[static_cast<std::size_t>(t + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

/// Separable Gaussian blur with replicate padding.
inline ScalarField gaussian_blur(const ScalarField& f, double sigma, int radius) {
  const auto kernel = gaussian_kernel(sigma, radius);
  const auto m = static_cast<long>(f.rows());
  const auto n = static_cast<long>(f.cols());
  ScalarField tmp(f.dims());
  ScalarField out(f.dims());
  auto clamp = [](long v, long hi) { return v < 0 ? 0 : (v >= hi ? hi - 1 : v); };
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < n; ++j) {
      double s = 0.0;
      for (int t = -radius; t <= radius; ++t) {
        s += kernel[static_cast<std::size_t>(t + radius)] *
             f(static_cast<std::size_t>(i), static_cast<std::size_t>(clamp(j + t, n)));
      }
      tmp(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = s;
    }
  }
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < n; ++j) {
      double s = 0.0;
      for (int t = -radius; t <= radius; ++t) {
        s += kernel[static_cast<std::size_t>(t + radius)] *
             tmp(static_cast<std::size_t>(clamp(i + t, m)), static_cast<std::size_t>(j));
      }
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = s;
    }
  }
  return out;
}

/// The input is expected in [0, 1]; rho is calibrated to that range.
inline ScalarField edge_detector(const ScalarField& f, const EdgeParams& p) {
  p.validate();
  require_finite(f, "edge_detector");
  const ScalarField smooth = gaussian_blur(f, p.sigma, p.effective_radius());
  ScalarField g(f.dims());
  for (std::size_t i = 0; i < f.rows(); ++i) {
    for (std::size_t j = 0; j < f.cols(); ++j) {
      const double mag = central_gradient_magnitude_at(smooth, i, j);
      g(i, j) = 1.0 / (1.0 + p.rho * (p.power == 2 ? mag * mag : mag));
    }
  }
  return g;
}

/// True when every value lies in [0, 1].
inline bool is_unit_range(const ScalarField& f) {
  for (double v : f.values()) {
    if (v < 0.0 || v > 1.0) return false;
  }
  return true;
}

}  // namespace toposnake
