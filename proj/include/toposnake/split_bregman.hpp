#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "toposnake/energy.hpp"
#include "toposnake/grid.hpp"
#include "toposnake/regularizers.hpp"
#include "toposnake/repulsion.hpp"
#include "toposnake/screened_poisson.hpp"

namespace toposnake {

enum class WMode { threshold, fixed_point };

struct SolverParams {
  EnergyWeights weights;
  RegularizerParams regs;
  RepulsionParams rep;
  double tau = 0.1;
  int inner_iters = 3;
  int outer_iters = 3000;
  /// Passes of the fixed-point w update; ignored in threshold mode.
  int w_iters = 1;
  double tol_inner = 1e-5;
  double tol_outer = 1e-5;
  WMode w_mode = WMode::threshold;
  /// Unit projection of w is applied where |phi| < constraint_band; elsewhere w
  /// keeps the unconstrained minimizer. Infinity (the default) projects everywhere.
  double constraint_band = std::numeric_limits<double>::infinity();
  /// Off by default. When set, b accumulates grad phi minus the vector before
  /// projection, so the projection no longer feeds back into b.
  bool bregman_on_shrunk = false;

  void validate() const {
    weights.validate();
    regs.validate();
    rep.validate();
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be >= 0");
    if (inner_iters < 0 || outer_iters < 0) throw std::invalid_argument("iteration counts must be >= 0");
    if (w_iters < 1) throw std::invalid_argument("w_iters must be >= 1");
    if (!(tol_inner > 0.0) || !(tol_outer > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (!(constraint_band > 0.0)) throw std::invalid_argument("constraint_band must be positive");
  }
};

struct SolverState {
  ScalarField phi;
  VectorField w;
  VectorField b;
  int k = 0;
  bool converged = false;
  /// Entry 0 is the initial state; one entry per outer iteration after that.
  std::vector<EnergyBreakdown> energy_log;
  /// Relative change ||phi^{k+1} - phi^k|| / ||phi^k||, one per outer iteration.
  std::vector<double> phi_change_log;
  std::vector<int> inner_iters_log;
};

/// What one w update did to the unit-norm constraint.
struct WUpdateStats {
  std::size_t projected = 0;
  std::size_t kept_previous = 0;
  /// max | |w| - 1 | over projected pixels.
  double max_unit_deviation = 0.0;
};

struct IterationInfo {
  int k = 0;
  double phi_change = 0.0;
  int inner_iters = 0;
  WUpdateStats w_stats;
};

/// Alternating minimization for the self-repelling snake:
///   phi step : S semi-implicit sweeps (1 - tau mu Lap) phi^{s+1} = F(phi^s) solved by FFT,
///   w step   : generalized shrinkage (or fixed point) followed by unit projection,
///   b step   : b += grad phi - w.
/// Per-pixel storage is phi, two phi iterates, w, b, v, g and the half spectrum.
class SplitBregmanSolver {
 public:
  using Observer = std::function<void(const SolverState&, const IterationInfo&)>;

  SplitBregmanSolver(ScalarField edge_map, SolverParams params)
      : params_(std::move(params)),
        g_(std::move(edge_map)),
        poisson_(g_.dims(), params_.tau * params_.weights.mu),
        cur_(g_.dims()),
        next_(g_.dims()),
        v_(g_.dims()) {
    params_.validate();
    require_solver_grid(g_.dims(), "SplitBregmanSolver");
    require_finite(g_, "SplitBregmanSolver edge map");
  }

  [[nodiscard]] const SolverParams& params() const noexcept { return params_; }
  [[nodiscard]] const ScalarField& edge_map() const noexcept { return g_; }

  /// w^0 = grad phi^0, b^0 = 0.
  [[nodiscard]] SolverState initial_state(const ScalarField& phi0) {
    require_same_dims(phi0.dims(), g_.dims(), "initial_state");
    require_finite(phi0, "initial_state");
    SolverState st;
    st.phi = phi0;
    st.w = gradient_forward(phi0);
    st.b = VectorField(phi0.dims());
    st.energy_log.push_back(energy(st));
    return st;
  }

  /// Pointwise right-hand side F for the sweep starting at `phi_s`. `v` must be
  /// the repulsion vector of (w, phi_s). Writes into `out`, which may alias
  /// nothing but may hold scratch.
  void phi_rhs_into(const ScalarField& phi_s, const SolverState& st, const VectorField& v,
                    ScalarField& out) const {
    const auto& wt = params_.weights;
    const auto& regs = params_.regs;
    const double tau = params_.tau;
    const std::size_t n = phi_s.cols();
    parallel_rows(phi_s.rows(), [&](std::size_t i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = i * n + j;
        const double p = phi_s[k];
        double force = 0.0;
        if (std::abs(p) <= regs.band_support()) {
          const double wn = std::hypot(st.w.c1[k], st.w.c2[k]);
          force += -wt.gamma * g_[k] * wn * dirac_eps_prime(p, regs.epsilon);
          force += wt.alpha * g_[k] * dirac_eps(p, regs.epsilon);
          force += repulsion_force_at(p, st.w.c1[k], st.w.c2[k], v.c1[k], v.c2[k], wt.beta, regs);
        }
        force += wt.mu * divergence_of_difference_at(st.b, st.w, i, j);
        out[k] = p + tau * force;
      }
    });
  }

  [[nodiscard]] ScalarField phi_rhs(const ScalarField& phi_s, const SolverState& st) {
    ScalarField out(phi_s.dims());
    nonlocal_vector_into(st.w, phi_s, params_.rep, params_.regs, out, v_);
    phi_rhs_into(phi_s, st, v_, out);
    return out;
  }

  /// Inner sweeps from phi^k; result left in cur_. Returns the sweeps used.
  int phi_subproblem(const SolverState& st) {
    cur_ = st.phi;
    int used = 0;
    for (int s = 0; s < params_.inner_iters; ++s) {
      // next_ holds h(phi^s) while v is formed, then F, then phi^{s+1}.
      if (params_.weights.beta != 0.0) {
        nonlocal_vector_into(st.w, cur_, params_.rep, params_.regs, next_, v_);
      } else {
        v_.fill(0.0);
      }
      phi_rhs_into(cur_, st, v_, next_);
      poisson_.solve_in_place(next_);
      check_stability(next_, st.k);
      const double change = l2_distance(next_, cur_) / (l2_norm(cur_) + 1e-6);
      std::swap(cur_, next_);
      ++used;
      if (change <= params_.tol_inner) break;
    }
    return used;
  }

  /// Shrinkage w update from phi^{k+1} (in `phi`) followed by unit projection.
  WUpdateStats update_w_threshold(const ScalarField& phi, SolverState& st) {
    const auto& wt = params_.weights;
    const auto& regs = params_.regs;
    prepare_repulsion(st.w, phi);
    const double rep_coeff = 2.0 * wt.beta / wt.mu;
    const double shrink_coeff = wt.gamma / wt.mu;
    return update_w_pointwise(phi, st, [&](std::size_t k, double g1, double g2, double& o1, double& o2) {
      const double h = next_[k];
      const double b1 = g1 + st.b.c1[k] + rep_coeff * h * v_.c1[k];
      const double b2 = g2 + st.b.c2[k] + rep_coeff * h * v_.c2[k];
      const double mag = std::hypot(b1, b2);
      const double thr = shrink_coeff * g_[k] * dirac_eps(phi[k], regs.epsilon);
      if (mag == 0.0) {
        o1 = 0.0;
        o2 = 0.0;
        return;
      }
      const double shrunk = std::max(mag - thr, 0.0);
      o1 = shrunk * b1 / mag;
      o2 = shrunk * b2 / mag;
    });
  }

  /// Fixed-point w update: R passes of the closed-form approximation, each
  /// recomputing v from the current w and projecting.
  WUpdateStats update_w_fixed_point(const ScalarField& phi, SolverState& st) {
    const auto& wt = params_.weights;
    const auto& regs = params_.regs;
    WUpdateStats stats;
    for (int r = 0; r < params_.w_iters; ++r) {
      prepare_repulsion(st.w, phi);
      stats = update_w_pointwise(phi, st, [&](std::size_t k, double g1, double g2, double& o1, double& o2) {
        const double h = next_[k];
        const double denom = wt.gamma * g_[k] * dirac_eps(phi[k], regs.epsilon) + wt.mu;
        o1 = (wt.mu * g1 + wt.mu * st.b.c1[k] + 2.0 * wt.beta * h * v_.c1[k]) / denom;
        o2 = (wt.mu * g2 + wt.mu * st.b.c2[k] + 2.0 * wt.beta * h * v_.c2[k]) / denom;
      });
    }
    return stats;
  }

  /// b^{k+1} = b^k + grad phi^{k+1} - w^{k+1}.
  static void update_b(const ScalarField& phi, SolverState& st) {
    const std::size_t n = phi.cols();
    for (std::size_t i = 0; i < phi.rows(); ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double g1 = 0.0;
        double g2 = 0.0;
        gradient_forward_at(phi, i, j, g1, g2);
        const std::size_t k = i * n + j;
        st.b.c1[k] += g1 - st.w.c1[k];
        st.b.c2[k] += g2 - st.w.c2[k];
      }
    }
  }

  /// One outer iteration. Returns the relative phi change.
  IterationInfo step(SolverState& st) {
    IterationInfo info;
    info.k = st.k;
    info.inner_iters = phi_subproblem(st);
    info.w_stats = params_.w_mode == WMode::threshold ? update_w_threshold(cur_, st)
                                                      : update_w_fixed_point(cur_, st);
    // the logged penalty pairs w^{k+1} with the b^k its subproblem used
    EnergyBreakdown e = energy(cur_, st.w, st.b);
    if (!params_.bregman_on_shrunk) update_b(cur_, st);
    info.phi_change = l2_distance(cur_, st.phi) / std::max(l2_norm(st.phi), 1e-300);
    std::swap(st.phi, cur_);
    ++st.k;
    st.phi_change_log.push_back(info.phi_change);
    st.inner_iters_log.push_back(info.inner_iters);
    st.energy_log.push_back(e);
    return info;
  }

  /// Iterates until the relative phi change drops to tol_outer or outer_iters is reached.
  SolverState run(const ScalarField& phi0, const Observer& observer = {}) {
    SolverState st = initial_state(phi0);
    while (st.k < params_.outer_iters) {
      const IterationInfo info = step(st);
      if (observer) observer(st, info);
      if (info.phi_change <= params_.tol_outer) {
        st.converged = true;
        break;
      }
    }
    return st;
  }

  /// Energy of the current state, splitting penalty included. Uses solver scratch.
  EnergyBreakdown energy(const SolverState& st) { return energy(st.phi, st.w, st.b); }

  EnergyBreakdown energy(const ScalarField& phi, const VectorField& w, const VectorField& b) {
    const auto& regs = params_.regs;
    const double eg = geodesic_length_energy(phi, g_, regs.epsilon);
    const double ea = balloon_energy(phi, g_, regs.epsilon);
    double er = 0.0;
    if (params_.weights.beta != 0.0) {
      nonlocal_vector_into(w, phi, params_.rep, regs, next_, v_);
      er = repulsion_energy_from(w, next_, v_);
    }
    const double ep = penalty_energy(phi, w, b, params_.weights.mu);
    return combine(params_.weights, eg, ea, er, ep);
  }

 private:
  /// Leaves h(phi) in next_ and v(w, phi) in v_.
  void prepare_repulsion(const VectorField& w, const ScalarField& phi) {
    if (params_.weights.beta != 0.0) {
      nonlocal_vector_into(w, phi, params_.rep, params_.regs, next_, v_);
    } else {
      next_.fill(0.0);
      v_.fill(0.0);
    }
  }

  template <class Candidate>
  WUpdateStats update_w_pointwise(const ScalarField& phi, SolverState& st, Candidate&& candidate) {
    WUpdateStats stats;
    const std::size_t n = phi.cols();
    const double band = params_.constraint_band;
    for (std::size_t i = 0; i < phi.rows(); ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = i * n + j;
        double g1 = 0.0;
        double g2 = 0.0;
        gradient_forward_at(phi, i, j, g1, g2);
        double o1 = 0.0;
        double o2 = 0.0;
        candidate(k, g1, g2, o1, o2);
        if (params_.bregman_on_shrunk) {
          st.b.c1[k] += g1 - o1;
          st.b.c2[k] += g2 - o2;
        }
        const double mag = std::hypot(o1, o2);
        if (!(std::abs(phi[k]) < band)) {
          st.w.c1[k] = o1;
          st.w.c2[k] = o2;
          continue;
        }
        if (mag == 0.0) {
          ++stats.kept_previous;
          continue;
        }
        st.w.c1[k] = o1 / mag;
        st.w.c2[k] = o2 / mag;
        ++stats.projected;
        stats.max_unit_deviation =
            std::max(stats.max_unit_deviation, std::abs(std::hypot(st.w.c1[k], st.w.c2[k]) - 1.0));
      }
    }
    return stats;
  }

  void check_stability(const ScalarField& phi, int k) const {
    const double limit =
        10.0 * std::hypot(static_cast<double>(phi.rows()), static_cast<double>(phi.cols()));
    for (double v : phi.values()) {
      if (!std::isfinite(v) || std::abs(v) > limit) {
        throw InstabilityError("level set diverged at outer iteration " + std::to_string(k) +
                               " (|phi| beyond 10x grid diameter); reduce tau");
      }
    }
  }

  SolverParams params_;
  ScalarField g_;
  ScreenedPoissonSolver poisson_;
  ScalarField cur_;
  ScalarField next_;
  VectorField v_;
};

}  // namespace toposnake
