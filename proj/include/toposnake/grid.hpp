#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "toposnake/memory.hpp"
#include "toposnake/parallel.hpp"

namespace toposnake {

/// Grid shape. Stencils need at least one interior pixel, so both extents are >= 3.
struct GridDims {
  std::size_t rows = 0;
  std::size_t cols = 0;

  GridDims() = default;
  GridDims(std::size_t m, std::size_t n) : rows(m), cols(n) {
    if (m == 0 || n == 0) {
      throw std::invalid_argument("GridDims: empty grid " + std::to_string(m) + "x" +
                                  std::to_string(n));
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return rows * cols; }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

inline std::string to_string(const GridDims& d) {
  return std::to_string(d.rows) + "x" + std::to_string(d.cols);
}

inline void require_same_dims(const GridDims& a, const GridDims& b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + to_string(a) +
                                " vs " + to_string(b) + ")");
  }
}

/// Dense row-major M x N field. Storage goes through the tracking allocator so
/// solver memory can be audited.
template <class T>
class Field {
 public:
  using value_type = T;
  using storage_type = std::vector<T, TrackingAllocator<T>>;

  Field() = default;
  explicit Field(GridDims dims, T fill = T{}) : dims_(dims), data_(dims.size(), fill) {}

  [[nodiscard]] const GridDims& dims() const noexcept { return dims_; }
  [[nodiscard]] std::size_t rows() const noexcept { return dims_.rows; }
  [[nodiscard]] std::size_t cols() const noexcept { return dims_.cols; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * dims_.cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * dims_.cols + j];
  }
  T& operator[](std::size_t k) noexcept { return data_[k]; }
  const T& operator[](std::size_t k) const noexcept { return data_[k]; }

  [[nodiscard]] std::span<T> values() noexcept { return data_; }
  [[nodiscard]] std::span<const T> values() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  [[nodiscard]] bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
  }

  friend bool operator==(const Field& a, const Field& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  GridDims dims_;
  storage_type data_;
};

/// Two-channel field: channel 1 is the row (i) direction, channel 2 the column (j) direction.
template <class T>
struct VectorField2 {
  Field<T> c1;
  Field<T> c2;

  VectorField2() = default;
  explicit VectorField2(GridDims dims, T fill = T{}) : c1(dims, fill), c2(dims, fill) {}

  [[nodiscard]] const GridDims& dims() const noexcept { return c1.dims(); }
  [[nodiscard]] std::size_t size() const noexcept { return c1.size(); }
  [[nodiscard]] bool all_finite() const noexcept { return c1.all_finite() && c2.all_finite(); }
  void fill(T v) {
    c1.fill(v);
    c2.fill(v);
  }
  [[nodiscard]] T norm_at(std::size_t k) const noexcept { return std::hypot(c1[k], c2[k]); }

  friend bool operator==(const VectorField2&, const VectorField2&) = default;
};

using ScalarField = Field<double>;
using VectorField = VectorField2<double>;
using Mask = Field<unsigned char>;

/// Raised when a level set blows up, usually because tau is too large.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solvers need a full 3 x 3 stencil somewhere on the grid.
inline void require_solver_grid(const GridDims& d, const char* what) {
  if (d.rows < 3 || d.cols < 3) {
    throw std::invalid_argument(std::string(what) + ": grid must be at least 3x3, got " + to_string(d));
  }
}

template <class T>
void require_finite(const Field<T>& f, const char* what) {
  if (!f.all_finite()) throw std::domain_error(std::string(what) + ": non-finite input");
}

template <class T>
void require_finite(const VectorField2<T>& f, const char* what) {
  if (!f.all_finite()) throw std::domain_error(std::string(what) + ": non-finite input");
}

// Boundary convention: the grid carries no ghost layer. Forward differences
// vanish at the last row/column (replicated neighbour), and the backward
// divergence drops the out-of-range term at the first row/column. With these
// choices divergence_backward is exactly the negative adjoint of gradient_forward.

/// Forward-difference gradient at pixel (i, j), written into (g1, g2).
template <class T>
inline void gradient_forward_at(const Field<T>& phi, std::size_t i, std::size_t j, T& g1,
                                T& g2) noexcept {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  const T c = phi(i, j);
  g1 = i + 1 < m ? phi(i + 1, j) - c : T{};
  g2 = j + 1 < n ? phi(i, j + 1) - c : T{};
}

template <class T>
VectorField2<T> gradient_forward(const Field<T>& phi) {
  require_finite(phi, "gradient_forward");
  VectorField2<T> out(phi.dims());
  parallel_rows(phi.rows(), [&](std::size_t i) {
    for (std::size_t j = 0; j < phi.cols(); ++j) {
      gradient_forward_at(phi, i, j, out.c1(i, j), out.c2(i, j));
    }
  });
  return out;
}

/// Backward-difference divergence at (i, j) of the field (u1, u2).
template <class T>
inline T divergence_backward_at(const Field<T>& u1, const Field<T>& u2, std::size_t i,
                                std::size_t j) noexcept {
  const std::size_t m = u1.rows();
  const std::size_t n = u1.cols();
  T d{};
  if (i + 1 < m) d += u1(i, j);
  if (i > 0) d -= u1(i - 1, j);
  if (j + 1 < n) d += u2(i, j);
  if (j > 0) d -= u2(i, j - 1);
  return d;
}

template <class T>
Field<T> divergence_backward(const VectorField2<T>& u) {
  require_finite(u, "divergence_backward");
  Field<T> out(u.dims());
  parallel_rows(out.rows(), [&](std::size_t i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = divergence_backward_at(u.c1, u.c2, i, j);
  });
  return out;
}

/// Divergence of (a - b) without materialising the difference.
template <class T>
inline T divergence_of_difference_at(const VectorField2<T>& a, const VectorField2<T>& b,
                                     std::size_t i, std::size_t j) noexcept {
  return divergence_backward_at(a.c1, a.c2, i, j) - divergence_backward_at(b.c1, b.c2, i, j);
}

/// 5-point Laplacian with replicated (homogeneous Neumann) neighbours.
template <class T>
inline T laplacian_at(const Field<T>& phi, std::size_t i, std::size_t j) noexcept {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  const T c = phi(i, j);
  const T up = i > 0 ? phi(i - 1, j) : c;
  const T down = i + 1 < m ? phi(i + 1, j) : c;
  const T left = j > 0 ? phi(i, j - 1) : c;
  const T right = j + 1 < n ? phi(i, j + 1) : c;
  return up + down + left + right - T{4} * c;
}

template <class T>
Field<T> laplacian(const Field<T>& phi) {
  require_finite(phi, "laplacian");
  Field<T> out(phi.dims());
  parallel_rows(phi.rows(), [&](std::size_t i) {
    for (std::size_t j = 0; j < phi.cols(); ++j) out(i, j) = laplacian_at(phi, i, j);
  });
  return out;
}

/// Periodic 5-point Laplacian (wrap-around neighbours); the operator the FFT solve inverts.
template <class T>
Field<T> laplacian_periodic(const Field<T>& phi) {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  Field<T> out(phi.dims());
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t ip = (i + 1) % m;
    const std::size_t im = (i + m - 1) % m;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jp = (j + 1) % n;
      const std::size_t jm = (j + n - 1) % n;
      out(i, j) = phi(im, j) + phi(ip, j) + phi(i, jm) + phi(i, jp) - T{4} * phi(i, j);
    }
  }
  return out;
}

/// Central-difference gradient magnitude with replicated neighbours at the frame.
template <class T>
inline T central_gradient_magnitude_at(const Field<T>& phi, std::size_t i, std::size_t j) noexcept {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  const T up = phi(i > 0 ? i - 1 : i, j);
  const T down = phi(i + 1 < m ? i + 1 : i, j);
  const T left = phi(i, j > 0 ? j - 1 : j);
  const T right = phi(i, j + 1 < n ? j + 1 : j);
  return std::hypot((down - up) / T{2}, (right - left) / T{2});
}

template <class T>
Field<T> central_gradient_magnitude(const Field<T>& phi) {
  Field<T> out(phi.dims());
  parallel_rows(phi.rows(), [&](std::size_t i) {
    for (std::size_t j = 0; j < phi.cols(); ++j) out(i, j) = central_gradient_magnitude_at(phi, i, j);
  });
  return out;
}

template <class T>
T l2_norm(const Field<T>& f) {
  T s{};
  for (T v : f.values()) s += v * v;
  return std::sqrt(s);
}

template <class T>
T l2_distance(const Field<T>& a, const Field<T>& b) {
  require_same_dims(a.dims(), b.dims(), "l2_distance");
  T s{};
  for (std::size_t k = 0; k < a.size(); ++k) {
    const T d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

template <class T>
T max_abs(const Field<T>& f) {
  T m{};
  for (T v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

template <class T>
T max_abs(const VectorField2<T>& f) {
  return std::max(max_abs(f.c1), max_abs(f.c2));
}

/// Sum over all pixels of a . b.
template <class T>
T inner_product(const VectorField2<T>& a, const VectorField2<T>& b) {
  require_same_dims(a.dims(), b.dims(), "inner_product");
  T s{};
  for (std::size_t k = 0; k < a.size(); ++k) s += a.c1[k] * b.c1[k] + a.c2[k] * b.c2[k];
  return s;
}

template <class T>
T inner_product(const Field<T>& a, const Field<T>& b) {
  require_same_dims(a.dims(), b.dims(), "inner_product");
  T s{};
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace toposnake
