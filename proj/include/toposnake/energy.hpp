#pragma once

#include <cmath>
#include <stdexcept>

#include "toposnake/grid.hpp"
#include "toposnake/regularizers.hpp"
#include "toposnake/repulsion.hpp"

namespace toposnake {

/// gamma: geodesic length, alpha: balloon, beta: repulsion, mu: splitting penalty.
struct EnergyWeights {
  double gamma = 4.0;
  double alpha = 4.0;
  double beta = 0.2;
  double mu = 8.0;

  void validate() const {
    if (!(gamma >= 0.0) || !(alpha >= 0.0) || !(beta >= 0.0)) {
      throw std::invalid_argument("gamma, alpha and beta must be nonnegative");
    }
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    if (!std::isfinite(gamma) || !std::isfinite(alpha) || !std::isfinite(beta) ||
        !std::isfinite(mu)) {
      throw std::invalid_argument("energy weights must be finite");
    }
  }
};

struct EnergyBreakdown {
  double e_g = 0.0;
  double e_a = 0.0;
  double e_r = 0.0;
  double e_penalty = 0.0;
  double total = 0.0;
};

// All integrals are unit-weight pixel sums.

inline double geodesic_length_energy(const ScalarField& phi, const ScalarField& g, double eps) {
  require_same_dims(phi.dims(), g.dims(), "geodesic_length_energy");
  double s = 0.0;
  for (std::size_t i = 0; i < phi.rows(); ++i) {
    for (std::size_t j = 0; j < phi.cols(); ++j) {
      const double d = dirac_eps(phi(i, j), eps);
      if (d == 0.0) continue;
      double g1 = 0.0;
      double g2 = 0.0;
      gradient_forward_at(phi, i, j, g1, g2);
      s += g(i, j) * std::hypot(g1, g2) * d;
    }
  }
  return s;
}

inline double balloon_energy(const ScalarField& phi, const ScalarField& g, double eps) {
  require_same_dims(phi.dims(), g.dims(), "balloon_energy");
  double s = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) s += g[k] * (1.0 - heaviside_eps(phi[k], eps));
  return s;
}

/// -sum_x h(x) w(x) . v(x) given h = narrow_band(phi) and v from the same (w, phi).
inline double repulsion_energy_from(const VectorField& w, const ScalarField& band,
                                    const VectorField& v) {
  double s = 0.0;
  for (std::size_t k = 0; k < band.size(); ++k) {
    if (band[k] == 0.0) continue;
    s += band[k] * (w.c1[k] * v.c1[k] + w.c2[k] * v.c2[k]);
  }
  return -s;
}

/// -sum_x sum_{y in window(x)} G(x - y) (w(x) . w(y)) h(phi(x)) h(phi(y)), unweighted by beta.
inline double repulsion_energy(const ScalarField& phi, const VectorField& w,
                               const RepulsionParams& rep, const RegularizerParams& regs) {
  require_same_dims(phi.dims(), w.dims(), "repulsion_energy");
  ScalarField band(phi.dims());
  VectorField v(phi.dims());
  nonlocal_vector_into(w, phi, rep, regs, band, v);
  return repulsion_energy_from(w, band, v);
}

/// (mu / 2) sum |w - grad phi - b|^2.
inline double penalty_energy(const ScalarField& phi, const VectorField& w, const VectorField& b,
                             double mu) {
  require_same_dims(phi.dims(), w.dims(), "penalty_energy");
  require_same_dims(phi.dims(), b.dims(), "penalty_energy");
  double s = 0.0;
  for (std::size_t i = 0; i < phi.rows(); ++i) {
    for (std::size_t j = 0; j < phi.cols(); ++j) {
      double g1 = 0.0;
      double g2 = 0.0;
      gradient_forward_at(phi, i, j, g1, g2);
      const std::size_t k = i * phi.cols() + j;
      const double r1 = w.c1[k] - g1 - b.c1[k];
      const double r2 = w.c2[k] - g2 - b.c2[k];
      s += r1 * r1 + r2 * r2;
    }
  }
  return 0.5 * mu * s;
}

inline EnergyBreakdown combine(const EnergyWeights& wts, double e_g, double e_a, double e_r,
                               double e_penalty) {
  EnergyBreakdown e{e_g, e_a, e_r, e_penalty, 0.0};
  e.total = wts.gamma * e_g + wts.alpha * e_a + wts.beta * e_r + e_penalty;
  return e;
}

/// Model energy of (phi, w). When `b` is given the splitting penalty is included.
inline EnergyBreakdown total_energy(const ScalarField& phi, const VectorField& w,
                                    const VectorField* b, const ScalarField& g,
                                    const EnergyWeights& wts, const RepulsionParams& rep,
                                    const RegularizerParams& regs) {
  const double eg = geodesic_length_energy(phi, g, regs.epsilon);
  const double ea = balloon_energy(phi, g, regs.epsilon);
  const double er = wts.beta != 0.0 ? repulsion_energy(phi, w, rep, regs) : 0.0;
  const double ep = b != nullptr ? penalty_energy(phi, w, *b, wts.mu) : 0.0;
  return combine(wts, eg, ea, er, ep);
}

}  // namespace toposnake
