#pragma once

// Periodic lattice on the centered box [-R, R)^n, sampled fields on it, and
// the transform-based calculus (gradient, Laplacian, 2/3 dealiasing,
// lattice quadrature) that every other module is built on.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace magvirial {

using cplx = std::complex<double>;

namespace detail {
void* aligned_alloc_bytes(std::size_t bytes);
void aligned_free(void* p) noexcept;
}  // namespace detail

/// Allocator returning SIMD-aligned storage so transforms can run in place
/// on field buffers without copying.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    return static_cast<T*>(detail::aligned_alloc_bytes(n * sizeof(T)));
  }
  void deallocate(T* p, std::size_t) noexcept { detail::aligned_free(p); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <class T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {
struct GridImpl;
}

/// Uniform periodic lattice with N points per axis on [-R, R)^n.
///
/// Storage is row-major with the last axis fastest. Spectral coefficients
/// share the layout; index m along an axis carries the frequency
/// (pi/R) * (m < N/2 ? m : m - N), so the frequency set per axis is
/// (pi/R) * {-N/2, ..., N/2 - 1}.
///
/// Copies are cheap and share transform plans.
class Grid {
 public:
  /// Largest supported n * log2(N), i.e. at most 2^27 lattice points.
  static constexpr int kMaxLog2Points = 27;

  Grid(int dim, double extent, int points_per_axis);

  int dim() const noexcept;
  double extent() const noexcept;
  int points() const noexcept;
  double spacing() const noexcept;
  std::size_t size() const noexcept;
  double cell_volume() const noexcept;
  /// Largest frequency magnitude on an axis, (pi/R) * N/2.
  double axis_k_max() const noexcept;
  /// Largest |k|^2 over the lattice, n * axis_k_max^2.
  double k_squared_max() const noexcept;

  double coordinate(int i) const noexcept;
  double frequency(int m) const noexcept;
  std::span<const double> coordinates() const noexcept;
  std::span<const double> frequencies() const noexcept;

  int axis_index(std::size_t flat, int axis) const noexcept;
  void point(std::size_t flat, std::span<double> x) const noexcept;
  double radius_squared(std::size_t flat) const noexcept;
  /// Squared-frequency magnitude at a spectral index.
  double k_squared(std::size_t flat) const noexcept;
  /// True where the 2/3 rule keeps the coefficient.
  bool dealias_keeps(std::size_t flat) const noexcept;

  /// Unnormalized forward DFT (exp(-i k x) kernel). `in` and `out` may alias.
  void forward(const cplx* in, cplx* out) const;
  /// Inverse DFT including the 1/N^n normalization.
  void inverse(const cplx* in, cplx* out) const;

  bool operator==(const Grid& other) const noexcept;

 private:
  std::shared_ptr<const detail::GridImpl> impl_;
};

Grid make_grid(int dim, double extent, int points_per_axis);

/// Sampled function on a grid. Value type; a field may be flagged diverged
/// when its samples stopped being trustworthy.
template <class T>
class Field {
 public:
  Field(Grid grid, T fill = T{}) : grid_(std::move(grid)), values_(grid_.size(), fill) {}

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  T* data() noexcept { return values_.data(); }
  const T* data() const noexcept { return values_.data(); }
  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }
  T& operator[](std::size_t i) noexcept { return values_[i]; }
  const T& operator[](std::size_t i) const noexcept { return values_[i]; }

  bool diverged() const noexcept { return diverged_; }
  void set_diverged(bool d) noexcept { diverged_ = d; }

 private:
  Grid grid_;
  AlignedVector<T> values_;
  bool diverged_ = false;
};

using ComplexField = Field<cplx>;
using RealField = Field<double>;
using VectorField = std::vector<RealField>;
using ComplexVectorField = std::vector<ComplexField>;

/// Fill a field from a function of the physical point.
template <class T, class Fn>
Field<T> sample(const Grid& grid, Fn&& fn) {
  Field<T> f(grid);
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    f[i] = static_cast<T>(fn(std::span<const double>(x)));
  }
  return f;
}

bool all_finite(const ComplexField& u) noexcept;
bool all_finite(const RealField& f) noexcept;

ComplexField to_complex(const RealField& f);
RealField abs_squared(const ComplexField& u);

ComplexField forward_transform(const ComplexField& u);
ComplexField inverse_transform(const ComplexField& u_hat);

/// Component j is the inverse transform of (i k_j) u_hat.
ComplexVectorField spectral_gradient(const ComplexField& u);
ComplexField spectral_divergence(const ComplexVectorField& w);
/// Inverse transform of -|k|^2 u_hat.
ComplexField spectral_laplacian(const ComplexField& u);
/// Zero every coefficient with some |k_j| above 2/3 of the axis maximum.
ComplexField dealias(const ComplexField& u);

/// h^n times the sum of samples.
double quadrature(const RealField& f);
cplx quadrature(const ComplexField& f);
/// <f, g> = integral of f * conj(g).
cplx inner(const ComplexField& f, const ComplexField& g);
/// integral of |u|^2.
double mass(const ComplexField& u);
/// h^n / N^n * sum |u_hat|^2, the Parseval counterpart of mass().
double spectral_mass(const ComplexField& u_hat);
double sup_norm(const ComplexField& u);

}  // namespace magvirial
