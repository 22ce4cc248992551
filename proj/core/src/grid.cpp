#include "magvirial/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <new>
#include <numbers>
#include <string>

namespace magvirial {
namespace detail {

void* aligned_alloc_bytes(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void aligned_free(void* p) noexcept { fftw_free(p); }

namespace {
// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct GridImpl {
  int dim = 0;
  double extent = 0.0;
  int points = 0;
  int log2_points = 0;
  double spacing = 0.0;
  std::size_t size = 0;
  std::vector<double> coords;
  std::vector<double> freqs;
  fftw_plan forward_plan = nullptr;
  fftw_plan inverse_plan = nullptr;

  GridImpl(int n, double r, int npts) : dim(n), extent(r), points(npts) {
    log2_points = std::countr_zero(static_cast<unsigned>(npts));
    spacing = 2.0 * r / npts;
    size = std::size_t{1} << (log2_points * n);
    coords.resize(static_cast<std::size_t>(npts));
    freqs.resize(static_cast<std::size_t>(npts));
    const double k0 = std::numbers::pi / r;
    for (int i = 0; i < npts; ++i) {
      coords[static_cast<std::size_t>(i)] = -r + i * spacing;
      const int m = i < npts / 2 ? i : i - npts;
      freqs[static_cast<std::size_t>(i)] = k0 * m;
    }
    std::vector<int> shape(static_cast<std::size_t>(n), npts);
    fftw_complex* scratch = fftw_alloc_complex(size);
    if (scratch == nullptr) throw std::bad_alloc();
    {
      std::lock_guard lock(planner_mutex());
      forward_plan = fftw_plan_dft(n, shape.data(), scratch, scratch, FFTW_FORWARD, FFTW_ESTIMATE);
      inverse_plan = fftw_plan_dft(n, shape.data(), scratch, scratch, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_free(scratch);
    if (forward_plan == nullptr || inverse_plan == nullptr) {
      throw std::runtime_error("failed to create FFT plans");
    }
  }

  ~GridImpl() {
    std::lock_guard lock(planner_mutex());
    if (forward_plan != nullptr) fftw_destroy_plan(forward_plan);
    if (inverse_plan != nullptr) fftw_destroy_plan(inverse_plan);
  }

  GridImpl(const GridImpl&) = delete;
  GridImpl& operator=(const GridImpl&) = delete;
};

}  // namespace detail

namespace {

void validate_grid(int dim, double extent, int points) {
  if (dim < 2) throw GridError("grid dimension must be at least 2, got " + std::to_string(dim));
  if (!(extent > 0.0) || !std::isfinite(extent)) throw GridError("grid extent must be positive and finite");
  if (points < 8 || !std::has_single_bit(static_cast<unsigned>(points))) {
    throw GridError("points per axis must be a power of two >= 8, got " + std::to_string(points));
  }
  const int log2n = std::countr_zero(static_cast<unsigned>(points));
  if (dim * log2n > Grid::kMaxLog2Points) {
    throw GridError("grid of " + std::to_string(points) + "^" + std::to_string(dim) +
                    " points exceeds the memory guard");
  }
}

}  // namespace

Grid::Grid(int dim, double extent, int points_per_axis) {
  validate_grid(dim, extent, points_per_axis);
  impl_ = std::make_shared<const detail::GridImpl>(dim, extent, points_per_axis);
}

Grid make_grid(int dim, double extent, int points_per_axis) {
  return Grid(dim, extent, points_per_axis);
}

int Grid::dim() const noexcept { return impl_->dim; }
double Grid::extent() const noexcept { return impl_->extent; }
int Grid::points() const noexcept { return impl_->points; }
double Grid::spacing() const noexcept { return impl_->spacing; }
std::size_t Grid::size() const noexcept { return impl_->size; }
double Grid::cell_volume() const noexcept { return std::pow(impl_->spacing, impl_->dim); }
double Grid::axis_k_max() const noexcept {
  return std::numbers::pi / impl_->extent * (impl_->points / 2);
}
double Grid::k_squared_max() const noexcept {
  const double k = axis_k_max();
  return impl_->dim * k * k;
}

double Grid::coordinate(int i) const noexcept { return impl_->coords[static_cast<std::size_t>(i)]; }
double Grid::frequency(int m) const noexcept { return impl_->freqs[static_cast<std::size_t>(m)]; }
std::span<const double> Grid::coordinates() const noexcept { return impl_->coords; }
std::span<const double> Grid::frequencies() const noexcept { return impl_->freqs; }

int Grid::axis_index(std::size_t flat, int axis) const noexcept {
  const int shift = impl_->log2_points * (impl_->dim - 1 - axis);
  return static_cast<int>((flat >> shift) & static_cast<std::size_t>(impl_->points - 1));
}

void Grid::point(std::size_t flat, std::span<double> x) const noexcept {
  for (int a = 0; a < impl_->dim; ++a) {
    x[static_cast<std::size_t>(a)] = impl_->coords[static_cast<std::size_t>(axis_index(flat, a))];
  }
}

double Grid::radius_squared(std::size_t flat) const noexcept {
  double r2 = 0.0;
  for (int a = 0; a < impl_->dim; ++a) {
    const double c = impl_->coords[static_cast<std::size_t>(axis_index(flat, a))];
    r2 += c * c;
  }
  return r2;
}

double Grid::k_squared(std::size_t flat) const noexcept {
  double k2 = 0.0;
  for (int a = 0; a < impl_->dim; ++a) {
    const double k = impl_->freqs[static_cast<std::size_t>(axis_index(flat, a))];
    k2 += k * k;
  }
  return k2;
}

bool Grid::dealias_keeps(std::size_t flat) const noexcept {
  const int n = impl_->points;
  for (int a = 0; a < impl_->dim; ++a) {
    const int i = axis_index(flat, a);
    const int m = i < n / 2 ? i : n - i;  // |mode number|
    if (3 * m > n) return false;
  }
  return true;
}

void Grid::forward(const cplx* in, cplx* out) const {
  if (in != out) std::copy(in, in + impl_->size, out);
  auto* buf = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(impl_->forward_plan, buf, buf);
}

void Grid::inverse(const cplx* in, cplx* out) const {
  if (in != out) std::copy(in, in + impl_->size, out);
  auto* buf = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(impl_->inverse_plan, buf, buf);
  const double scale = 1.0 / static_cast<double>(impl_->size);
  for (std::size_t i = 0; i < impl_->size; ++i) out[i] *= scale;
}

bool Grid::operator==(const Grid& other) const noexcept {
  if (impl_ == other.impl_) return true;
  return impl_->dim == other.impl_->dim && impl_->points == other.impl_->points &&
         impl_->extent == other.impl_->extent;
}

// ---------------------------------------------------------------------------

bool all_finite(const ComplexField& u) noexcept {
  return std::all_of(u.values().begin(), u.values().end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

bool all_finite(const RealField& f) noexcept {
  return std::all_of(f.values().begin(), f.values().end(), [](double v) { return std::isfinite(v); });
}

ComplexField to_complex(const RealField& f) {
  ComplexField u(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) u[i] = f[i];
  u.set_diverged(f.diverged());
  return u;
}

RealField abs_squared(const ComplexField& u) {
  RealField f(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) f[i] = std::norm(u[i]);
  f.set_diverged(u.diverged());
  return f;
}

ComplexField forward_transform(const ComplexField& u) {
  ComplexField out(u);
  u.grid().forward(out.data(), out.data());
  return out;
}

ComplexField inverse_transform(const ComplexField& u_hat) {
  ComplexField out(u_hat);
  u_hat.grid().inverse(out.data(), out.data());
  return out;
}

namespace {

bool flagged(const ComplexField& u) { return u.diverged() || !all_finite(u); }

}  // namespace

ComplexVectorField spectral_gradient(const ComplexField& u) {
  const Grid& g = u.grid();
  const bool bad = flagged(u);
  const ComplexField u_hat = forward_transform(u);
  ComplexVectorField grad;
  grad.reserve(static_cast<std::size_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) {
    ComplexField d(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      d[i] = cplx(0.0, g.frequency(g.axis_index(i, a))) * u_hat[i];
    }
    g.inverse(d.data(), d.data());
    d.set_diverged(bad);
    grad.push_back(std::move(d));
  }
  return grad;
}

ComplexField spectral_divergence(const ComplexVectorField& w) {
  if (w.empty()) throw std::invalid_argument("divergence of an empty vector field");
  const Grid& g = w.front().grid();
  if (static_cast<int>(w.size()) != g.dim()) {
    throw std::invalid_argument("vector field component count must equal the grid dimension");
  }
  ComplexField acc(g);
  bool bad = false;
  for (int a = 0; a < g.dim(); ++a) {
    const ComplexField& comp = w[static_cast<std::size_t>(a)];
    bad = bad || flagged(comp);
    const ComplexField c_hat = forward_transform(comp);
    for (std::size_t i = 0; i < g.size(); ++i) {
      acc[i] += cplx(0.0, g.frequency(g.axis_index(i, a))) * c_hat[i];
    }
  }
  g.inverse(acc.data(), acc.data());
  acc.set_diverged(bad);
  return acc;
}

ComplexField spectral_laplacian(const ComplexField& u) {
  const Grid& g = u.grid();
  const bool bad = flagged(u);
  ComplexField out = forward_transform(u);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] *= -g.k_squared(i);
  g.inverse(out.data(), out.data());
  out.set_diverged(bad);
  return out;
}

ComplexField dealias(const ComplexField& u) {
  const Grid& g = u.grid();
  const bool bad = flagged(u);
  ComplexField out = forward_transform(u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.dealias_keeps(i)) out[i] = 0.0;
  }
  g.inverse(out.data(), out.data());
  out.set_diverged(bad);
  return out;
}

double quadrature(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().cell_volume();
}

cplx quadrature(const ComplexField& f) {
  cplx s = 0.0;
  for (const cplx& v : f.values()) s += v;
  return s * f.grid().cell_volume();
}

cplx inner(const ComplexField& f, const ComplexField& g) {
  if (!(f.grid() == g.grid())) throw GridError("inner product of fields on different grids");
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::conj(g[i]);
  return s * f.grid().cell_volume();
}

double mass(const ComplexField& u) {
  double s = 0.0;
  for (const cplx& v : u.values()) s += std::norm(v);
  return s * u.grid().cell_volume();
}

double spectral_mass(const ComplexField& u_hat) {
  double s = 0.0;
  for (const cplx& v : u_hat.values()) s += std::norm(v);
  return s * u_hat.grid().cell_volume() / static_cast<double>(u_hat.size());
}

double sup_norm(const ComplexField& u) {
  double m = 0.0;
  for (const cplx& v : u.values()) {
    const double a = std::abs(v);
    if (std::isnan(a)) return a;
    m = std::max(m, a);
  }
  return m;
}

}  // namespace magvirial
