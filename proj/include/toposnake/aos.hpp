#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "toposnake/energy.hpp"
#include "toposnake/grid.hpp"
#include "toposnake/regularizers.hpp"
#include "toposnake/repulsion.hpp"

namespace toposnake {

struct TridiagonalSystem {
  std::vector<double> sub;  // sub[i] couples row i to i-1; sub[0] unused
  std::vector<double> diag;
  std::vector<double> super;  // super[i] couples row i to i+1; super[n-1] unused
  std::vector<double> rhs;

  TridiagonalSystem() = default;
  explicit TridiagonalSystem(std::size_t n) : sub(n, 0.0), diag(n, 0.0), super(n, 0.0), rhs(n, 0.0) {}

  [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }

  [[nodiscard]] bool diagonally_dominant() const noexcept {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      const double off = (i > 0 ? std::abs(sub[i]) : 0.0) + (i + 1 < n ? std::abs(super[i]) : 0.0);
      if (std::abs(diag[i]) < off) return false;
    }
    return true;
  }

  /// A x for the stored matrix.
  [[nodiscard]] std::vector<double> apply(const std::vector<double>& x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = diag[i] * x[i];
      if (i > 0) s += sub[i] * x[i - 1];
      if (i + 1 < n) s += super[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }
};

/// LR decomposition, forward and backward substitution. Throws on a
/// non-dominant matrix or a zero pivot.
inline void thomas_solve_into(const TridiagonalSystem& sys, std::vector<double>& x, std::vector<double>& c) {
  const std::size_t n = sys.size();
  if (sys.sub.size() != n || sys.super.size() != n || sys.rhs.size() != n) {
    throw std::invalid_argument("thomas_solve: inconsistent lengths");
  }
  if (n == 0) {
    x.clear();
    return;
  }
  if (!sys.diagonally_dominant()) throw std::domain_error("thomas_solve: matrix not diagonally dominant");
  x.resize(n);
  c.resize(n);
  double piv = sys.diag[0];
  if (piv == 0.0) throw std::domain_error("thomas_solve: zero pivot");
  c[0] = n > 1 ? sys.super[0] / piv : 0.0;
  x[0] = sys.rhs[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = sys.diag[i] - sys.sub[i] * c[i - 1];
    if (piv == 0.0) throw std::domain_error("thomas_solve: zero pivot");
    c[i] = i + 1 < n ? sys.super[i] / piv : 0.0;
    x[i] = (sys.rhs[i] - sys.sub[i] * x[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
}

inline std::vector<double> thomas_solve(const TridiagonalSystem& sys) {
  std::vector<double> x;
  std::vector<double> c;
  thomas_solve_into(sys, x, c);
  return x;
}

enum class Direction { rows, cols };

inline constexpr double kAosGradientFloor = 1e-8;

/// Diffusion operator A_l along one grid line: off-diagonals
/// 2 gamma |grad phi_i| / (|grad phi_i| / g_i + |grad phi_j| / g_j), diagonal the
/// negative neighbour sum. `direction == rows` means the line runs along the
/// row index (a column of the image), line index `line` selects which.
inline TridiagonalSystem aos_line_operator(const ScalarField& phi, const ScalarField& g, double gamma,
                                           Direction direction, std::size_t line) {
  const bool along_rows = direction == Direction::rows;
  const std::size_t n = along_rows ? phi.rows() : phi.cols();
  auto at = [&](std::size_t t, std::size_t& i, std::size_t& j) {
    i = along_rows ? t : line;
    j = along_rows ? line : t;
  };
  std::vector<double> grad(n);
  std::vector<double> gv(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t i = 0;
    std::size_t j = 0;
    at(t, i, j);
    grad[t] = central_gradient_magnitude_at(phi, i, j) + kAosGradientFloor;
    gv[t] = g(i, j);
  }
  TridiagonalSystem a(n);
  auto coeff = [&](std::size_t p, std::size_t q) {
    return 2.0 * gamma * grad[p] / (grad[p] / gv[p] + grad[q] / gv[q]);
  };
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) a.sub[t] = coeff(t, t - 1);
    if (t + 1 < n) a.super[t] = coeff(t, t + 1);
    a.diag[t] = -(a.sub[t] + a.super[t]);
  }
  return a;
}

/// All line operators for one direction.
inline std::vector<TridiagonalSystem> aos_coefficients(const ScalarField& phi, const ScalarField& g, double gamma,
                                                       Direction direction) {
  require_same_dims(phi.dims(), g.dims(), "aos_coefficients");
  const std::size_t lines = direction == Direction::rows ? phi.cols() : phi.rows();
  std::vector<TridiagonalSystem> out;
  out.reserve(lines);
  for (std::size_t l = 0; l < lines; ++l) out.push_back(aos_line_operator(phi, g, gamma, direction, l));
  return out;
}

/// Godunov upwind |grad phi| for phi_t + speed |grad phi| = 0, replicated at the frame.
inline double godunov_gradient_at(const ScalarField& phi, std::size_t i, std::size_t j, double speed) noexcept {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  const double c = phi(i, j);
  const double dmx = c - phi(i > 0 ? i - 1 : i, j);
  const double dpx = phi(i + 1 < m ? i + 1 : i, j) - c;
  const double dmy = c - phi(i, j > 0 ? j - 1 : j);
  const double dpy = phi(i, j + 1 < n ? j + 1 : j) - c;
  double s = 0.0;
  if (speed > 0.0) {
    s = std::pow(std::max(dmx, 0.0), 2) + std::pow(std::min(dpx, 0.0), 2) + std::pow(std::max(dmy, 0.0), 2) +
        std::pow(std::min(dpy, 0.0), 2);
  } else {
    s = std::pow(std::min(dmx, 0.0), 2) + std::pow(std::max(dpx, 0.0), 2) + std::pow(std::min(dmy, 0.0), 2) +
        std::pow(std::max(dpy, 0.0), 2);
  }
  return std::sqrt(s);
}

/// Balloon term alpha g |grad phi| (it raises phi, so the interior shrinks for alpha g > 0).
inline ScalarField balloon_upwind(const ScalarField& phi, const ScalarField& g, double alpha) {
  require_same_dims(phi.dims(), g.dims(), "balloon_upwind");
  ScalarField out(phi.dims());
  parallel_rows(phi.rows(), [&](std::size_t i) {
    for (std::size_t j = 0; j < phi.cols(); ++j) {
      const double f = alpha * g(i, j);
      // phi_t = f |grad phi| is phi_t + (-f) |grad phi| = 0
      out(i, j) = f * godunov_gradient_at(phi, i, j, -f);
    }
  });
  return out;
}

/// Smoothed sign used by the re-initialization, sin(phi) clamped to [-1, 1].
inline double reinit_sign(double phi) noexcept {
  return std::abs(phi) >= 0.5 * M_PI ? (phi > 0.0 ? 1.0 : -1.0) : std::sin(phi);
}

/// psi_t = -S(phi)(|grad psi| - 1), psi(0) = phi, Godunov upwinding.
inline ScalarField reinitialize(const ScalarField& phi, int iters, double dt) {
  if (iters < 0) throw std::invalid_argument("reinitialize: iters must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("reinitialize: dt must be positive");
  ScalarField psi = phi;
  ScalarField next(phi.dims());
  for (int it = 0; it < iters; ++it) {
    parallel_rows(phi.rows(), [&](std::size_t i) {
      for (std::size_t j = 0; j < phi.cols(); ++j) {
        const double s = reinit_sign(phi(i, j));
        // psi_t + s |grad psi| = s
        next(i, j) = psi(i, j) - dt * s * (godunov_gradient_at(psi, i, j, s) - 1.0);
      }
    });
    std::swap(psi, next);
  }
  return psi;
}

struct AosParams {
  EnergyWeights weights;
  RegularizerParams regs;
  RepulsionParams rep;
  double tau = 0.1;
  int reinit_every = 5;
  int reinit_iters = 10;
  double reinit_dt = 0.3;
  int outer_iters = 3000;
  double tol = 1e-5;
  /// Fraction of line systems whose residual is checked per step.
  double residual_check_fraction = 0.01;

  void validate() const {
    weights.validate();
    regs.validate();
    rep.validate();
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be >= 0");
    if (reinit_every < 1 || reinit_iters < 1) throw std::invalid_argument("re-initialization counts must be >= 1");
    if (!(reinit_dt > 0.0)) throw std::invalid_argument("reinit_dt must be positive");
    if (outer_iters < 0) throw std::invalid_argument("outer_iters must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  }
};

struct AosState {
  ScalarField phi;
  int k = 0;
  bool converged = false;
  /// ||phi^{k+1} - phi^k|| / ||phi^k||, one per step.
  std::vector<double> phi_change_log;
  /// Band change per re-initialization cycle; this is what the stopping rule tests.
  std::vector<double> band_change_log;
  /// Entry 0 is the initial state. w is taken as grad phi, so the penalty is 0.
  std::vector<EnergyBreakdown> energy_log;
  /// Largest Thomas residual seen among checked lines.
  double max_residual = 0.0;
  std::size_t checked_lines = 0;
};

class AosSolver {
 public:
  using Observer = std::function<void(const AosState&)>;

  AosSolver(ScalarField edge_map, AosParams params) : params_(std::move(params)), g_(std::move(edge_map)) {
    params_.validate();
    require_solver_grid(g_.dims(), "AosSolver");
    require_finite(g_, "AosSolver edge map");
  }

  [[nodiscard]] const AosParams& params() const noexcept { return params_; }

  /// phi^k + tau (T2 + T3).
  [[nodiscard]] ScalarField explicit_part(const ScalarField& phi) const {
    const auto& wt = params_.weights;
    ScalarField rhs = balloon_upwind(phi, g_, wt.alpha);
    if (wt.beta != 0.0) {
      const ScalarField t3 = repulsion_speed_gradient_form(phi, wt.beta, params_.rep, params_.regs);
      for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += t3[k];
    }
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = phi[k] + params_.tau * rhs[k];
    return rhs;
  }

  /// One AOS step: average of the row-direction and column-direction solves of
  /// (1 - 2 tau A_l) u = phi^k + tau (T2 + T3).
  ScalarField step(const ScalarField& phi, AosState* audit = nullptr) {
    require_same_dims(phi.dims(), g_.dims(), "aos step");
    const ScalarField rhs = explicit_part(phi);
    ScalarField out(phi.dims());
    const double gamma = params_.weights.gamma;
    const double tau = params_.tau;
    std::size_t check_every = 0;
    if (params_.residual_check_fraction > 0.0) {
      check_every = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / params_.residual_check_fraction)));
    }
    for (Direction dir : {Direction::rows, Direction::cols}) {
      const bool along_rows = dir == Direction::rows;
      const std::size_t lines = along_rows ? phi.cols() : phi.rows();
      const std::size_t len = along_rows ? phi.rows() : phi.cols();
      std::vector<double> x;
      std::vector<double> c;
      for (std::size_t l = 0; l < lines; ++l) {
        TridiagonalSystem sys = aos_line_operator(phi, g_, gamma, dir, l);
        for (std::size_t t = 0; t < len; ++t) {
          sys.sub[t] *= -2.0 * tau;
          sys.super[t] *= -2.0 * tau;
          sys.diag[t] = 1.0 - 2.0 * tau * sys.diag[t];
          sys.rhs[t] = along_rows ? rhs(t, l) : rhs(l, t);
        }
        thomas_solve_into(sys, x, c);
        if (audit != nullptr && check_every != 0 && (l + step_counter_) % check_every == 0) {
          const std::vector<double> ax = sys.apply(x);
          double r = 0.0;
          for (std::size_t t = 0; t < len; ++t) r = std::max(r, std::abs(ax[t] - sys.rhs[t]));
          audit->max_residual = std::max(audit->max_residual, r);
          ++audit->checked_lines;
        }
        for (std::size_t t = 0; t < len; ++t) {
          double& o = along_rows ? out(t, l) : out(l, t);
          o += 0.5 * x[t];
        }
      }
    }
    ++step_counter_;
    check_stability(out);
    return out;
  }

  /// Relative change of phi over the band {|phi_ref| < l + eps}; the far field is
  /// excluded because the balloon term keeps raising it between re-initializations.
  [[nodiscard]] double band_change(const ScalarField& ref, const ScalarField& phi) const {
    const double band = params_.regs.band_support();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      if (std::abs(ref[k]) >= band) continue;
      const double d = phi[k] - ref[k];
      num += d * d;
      den += ref[k] * ref[k];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
  }

  /// Steps until the band change between consecutive re-initializations is at
  /// most tol, or outer_iters is reached. The level set is re-initialized every
  /// reinit_every steps.
  AosState run(const ScalarField& phi0, const Observer& observer = {}) {
    require_same_dims(phi0.dims(), g_.dims(), "aos run");
    require_finite(phi0, "aos run");
    AosState st;
    st.phi = phi0;
    st.energy_log.push_back(energy(st.phi));
    ScalarField checkpoint = phi0;
    while (st.k < params_.outer_iters) {
      ScalarField next = step(st.phi, &st);
      const bool reinit = (st.k + 1) % params_.reinit_every == 0;
      if (reinit) next = reinitialize(next, params_.reinit_iters, params_.reinit_dt);
      st.phi_change_log.push_back(l2_distance(next, st.phi) / std::max(l2_norm(st.phi), 1e-300));
      st.phi = std::move(next);
      ++st.k;
      st.energy_log.push_back(energy(st.phi));
      if (reinit) {
        st.band_change_log.push_back(band_change(checkpoint, st.phi));
        checkpoint = st.phi;
      }
      if (observer) observer(st);
      if (reinit && st.band_change_log.back() <= params_.tol) {
        st.converged = true;
        break;
      }
    }
    return st;
  }

  /// Model energy with w = grad phi.
  [[nodiscard]] EnergyBreakdown energy(const ScalarField& phi) const {
    const auto& regs = params_.regs;
    const double eg = geodesic_length_energy(phi, g_, regs.epsilon);
    const double ea = balloon_energy(phi, g_, regs.epsilon);
    const double er = params_.weights.beta != 0.0 ? repulsion_energy(phi, gradient_forward(phi), params_.rep, regs) : 0.0;
    return combine(params_.weights, eg, ea, er, 0.0);
  }

 private:
  void check_stability(const ScalarField& phi) const {
    const double limit = 10.0 * std::hypot(static_cast<double>(phi.rows()), static_cast<double>(phi.cols()));
    for (double v : phi.values()) {
      if (!std::isfinite(v) || std::abs(v) > limit) {
        throw InstabilityError("AOS level set diverged (|phi| beyond 10x grid diameter); reduce tau");
      }
    }
  }

  AosParams params_;
  ScalarField g_;
  std::size_t step_counter_ = 0;
};

}  // namespace toposnake
