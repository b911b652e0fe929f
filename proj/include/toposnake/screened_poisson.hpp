#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "toposnake/grid.hpp"

namespace toposnake {

namespace detail {
/// FFTW's planner is not thread-safe; plan creation and destruction go through this lock.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Solves (1 - c * Lap_per) u = F on an M x N grid with periodic boundaries,
/// c = tau * mu, by dividing in Fourier space by
///   1 - c (2 cos(2 pi k1 / M) + 2 cos(2 pi k2 / N) - 4) >= 1.
/// Plans and the half-spectrum buffer are built once and reused.
class ScreenedPoissonSolver {
 public:
  ScreenedPoissonSolver(GridDims dims, double coeff)
      : dims_(dims),
        coeff_(coeff),
        half_cols_(dims.cols / 2 + 1),
        spectrum_(dims.rows * half_cols_) {
    if (!(coeff >= 0.0) || !std::isfinite(coeff)) {
      throw std::invalid_argument("screened Poisson coefficient must be finite and >= 0");
    }
    cos_rows_.resize(dims.rows);
    cos_cols_.resize(half_cols_);
    for (std::size_t k = 0; k < dims.rows; ++k) {
      cos_rows_[k] = 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                    static_cast<double>(dims.rows));
    }
    for (std::size_t k = 0; k < half_cols_; ++k) {
      cos_cols_[k] = 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                    static_cast<double>(dims.cols));
    }
    auto* spec = reinterpret_cast<fftw_complex*>(spectrum_.data());
    std::lock_guard lock(detail::fftw_planner_mutex());
    const int m = static_cast<int>(dims.rows);
    const int n = static_cast<int>(dims.cols);
    // Planning array is released right away; UNALIGNED lets the plans run on
    // ordinary field storage through the new-array interface.
    double* scratch = fftw_alloc_real(dims.size());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_r2c_2d(m, n, scratch, spec, flags);
    backward_ = fftw_plan_dft_c2r_2d(m, n, spec, scratch, flags);
    fftw_free(scratch);
    if (forward_ == nullptr || backward_ == nullptr) throw std::runtime_error("FFTW planning failed");
  }

  ScreenedPoissonSolver(const ScreenedPoissonSolver&) = delete;
  ScreenedPoissonSolver& operator=(const ScreenedPoissonSolver&) = delete;

  ~ScreenedPoissonSolver() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (forward_ != nullptr) fftw_destroy_plan(forward_);
    if (backward_ != nullptr) fftw_destroy_plan(backward_);
  }

  [[nodiscard]] const GridDims& dims() const noexcept { return dims_; }
  [[nodiscard]] double coefficient() const noexcept { return coeff_; }

  /// Fourier symbol of (1 - c Lap_per) at frequency (k1, k2).
  [[nodiscard]] double symbol(std::size_t k1, std::size_t k2) const noexcept {
    return 1.0 - coeff_ * (cos_rows_[k1] + cos_cols_[k2] - 4.0);
  }

  /// Solves in place: `field` holds F on entry and the solution on exit.
  void solve_in_place(ScalarField& field) {
    require_same_dims(field.dims(), dims_, "ScreenedPoissonSolver");
    auto* spec = reinterpret_cast<fftw_complex*>(spectrum_.data());
    fftw_execute_dft_r2c(forward_, field.data(), spec);
    const double scale = 1.0 / static_cast<double>(dims_.size());
    for (std::size_t k1 = 0; k1 < dims_.rows; ++k1) {
      for (std::size_t k2 = 0; k2 < half_cols_; ++k2) {
        spectrum_[k1 * half_cols_ + k2] *= scale / symbol(k1, k2);
      }
    }
    fftw_execute_dft_c2r(backward_, spec, field.data());
  }

  [[nodiscard]] ScalarField solve(const ScalarField& rhs) {
    ScalarField out = rhs;
    solve_in_place(out);
    return out;
  }

 private:
  GridDims dims_;
  double coeff_;
  std::size_t half_cols_;
  std::vector<std::complex<double>, TrackingAllocator<std::complex<double>>> spectrum_;
  std::vector<double> cos_rows_;
  std::vector<double> cos_cols_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// One-shot solve of (1 - coeff * Lap_per) u = rhs.
inline ScalarField solve_screened_poisson(const ScalarField& rhs, double coeff) {
  require_finite(rhs, "solve_screened_poisson");
  ScreenedPoissonSolver solver(rhs.dims(), coeff);
  return solver.solve(rhs);
}

}  // namespace toposnake
