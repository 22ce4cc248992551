#include "magvirial/potentials.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

namespace magvirial {

// ---------------------------------------------------------------- matrices

AntisymMatrix::AntisymMatrix(int dim) : dim_(dim) {
  if (dim < 1) throw PotentialError("matrix dimension must be positive");
  entries_.assign(static_cast<std::size_t>(dim * dim), 0.0);
}

AntisymMatrix AntisymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  AntisymMatrix m(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n) {
      throw PotentialError("matrix must be square");
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const double b = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      if (a != -b || !std::isfinite(a)) {
        throw PotentialError("matrix is not antisymmetric at (" + std::to_string(i) + ", " +
                             std::to_string(j) + ")");
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) m.set(i, j, rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  }
  return m;
}

void AntisymMatrix::set(int i, int j, double value) {
  if (i == j) {
    if (value != 0.0) throw PotentialError("antisymmetric matrix has a zero diagonal");
    return;
  }
  entries_[static_cast<std::size_t>(i * dim_ + j)] = value;
  entries_[static_cast<std::size_t>(j * dim_ + i)] = -value;
}

AntisymMatrix AntisymMatrix::scaled(double factor) const {
  AntisymMatrix out(dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) out.set(i, j, factor * (*this)(i, j));
  }
  return out;
}

std::vector<double> AntisymMatrix::apply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(dim_), 0.0);
  for (int i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

std::vector<double> AntisymMatrix::left_apply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(dim_), 0.0);
  for (int j = 0; j < dim_; ++j) {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += x[static_cast<std::size_t>(i)] * (*this)(i, j);
    y[static_cast<std::size_t>(j)] = s;
  }
  return y;
}

std::vector<std::vector<double>> AntisymMatrix::rows() const {
  std::vector<std::vector<double>> r(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) r[static_cast<std::size_t>(i)].push_back((*this)(i, j));
  }
  return r;
}

AntisymMatrix build_M(int n) {
  if (n < 2) throw PotentialError("build_M needs n >= 2");
  int blocks = 0;
  if (n == 2) {
    blocks = 1;
  } else if (n % 2 == 1) {
    blocks = (n - 1) / 2;
  } else {
    blocks = (n - 2) / 2;
  }
  AntisymMatrix m(n);
  for (int b = 0; b < blocks; ++b) m.set(2 * b, 2 * b + 1, -1.0);
  return m;
}

// ---------------------------------------------------------------- names

std::string to_string(MagneticFamily f) {
  switch (f) {
    case MagneticFamily::zero: return "zero";
    case MagneticFamily::linear_M: return "linear_M";
    case MagneticFamily::singular_r2: return "singular_r2";
    case MagneticFamily::singular_cyl: return "singular_cyl";
    case MagneticFamily::custom_sampled: return "custom_sampled";
  }
  return "unknown";
}

std::string to_string(ElectricFamily f) {
  switch (f) {
    case ElectricFamily::zero: return "zero";
    case ElectricFamily::inverse_quadratic: return "inverse_quadratic";
    case ElectricFamily::custom_sampled: return "custom_sampled";
  }
  return "unknown";
}

MagneticFamily magnetic_family_from_string(const std::string& s) {
  for (auto f : {MagneticFamily::zero, MagneticFamily::linear_M, MagneticFamily::singular_r2,
                 MagneticFamily::singular_cyl, MagneticFamily::custom_sampled}) {
    if (to_string(f) == s) return f;
  }
  throw PotentialError("unknown magnetic family '" + s + "'");
}

ElectricFamily electric_family_from_string(const std::string& s) {
  for (auto f : {ElectricFamily::zero, ElectricFamily::inverse_quadratic, ElectricFamily::custom_sampled}) {
    if (to_string(f) == s) return f;
  }
  throw PotentialError("unknown electric family '" + s + "'");
}

// ---------------------------------------------------------------- taper

double Taper::value(double r) const noexcept {
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  const double s = (r - inner) / (outer - inner);
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double Taper::derivative(double r) const noexcept {
  if (r <= inner || r >= outer) return 0.0;
  const double w = outer - inner;
  const double s = (r - inner) / w;
  return -30.0 * s * s * (1.0 - s) * (1.0 - s) / w;
}

// ---------------------------------------------------------------- spec

void PotentialSpec::validate() const {
  if (dim < 2) throw PotentialError("potential dimension must be >= 2");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw PotentialError("epsilon must be >= 0");
  switch (magnetic) {
    case MagneticFamily::linear_M:
      if (!matrix) throw PotentialError("linear_M needs a matrix");
      if (matrix->dim() != dim) throw PotentialError("linear_M matrix dimension does not match");
      break;
    case MagneticFamily::singular_r2:
    case MagneticFamily::singular_cyl:
      if (dim != 3) throw PotentialError(to_string(magnetic) + " is only defined for n = 3");
      break;
    case MagneticFamily::custom_sampled:
      if (!custom_A) throw PotentialError("custom_sampled magnetic potential needs samples");
      if (static_cast<int>(custom_A->size()) != dim) {
        throw PotentialError("custom A must have one component per dimension");
      }
      for (const auto& c : *custom_A) {
        if (c.grid().dim() != dim) throw PotentialError("custom A grid dimension mismatch");
        if (!all_finite(c)) throw PotentialError("custom A has non-finite samples");
      }
      break;
    case MagneticFamily::zero: break;
  }
  if (taper) {
    if (magnetic != MagneticFamily::linear_M) throw PotentialError("taper is only supported for linear_M");
    if (!(taper->inner > 0.0) || !(taper->outer > taper->inner)) {
      throw PotentialError("taper radii must satisfy 0 < inner < outer");
    }
  }
  if (!std::isfinite(coupling)) throw PotentialError("coupling must be finite");
  if (electric == ElectricFamily::custom_sampled) {
    if (!custom_V) throw PotentialError("custom_sampled electric potential needs samples");
    if (custom_V->grid().dim() != dim) throw PotentialError("custom V grid dimension mismatch");
    if (!all_finite(*custom_V)) throw PotentialError("custom V has non-finite samples");
  }
}

bool PotentialSpec::trapping_free() const noexcept {
  return magnetic == MagneticFamily::zero || magnetic == MagneticFamily::singular_r2 ||
         magnetic == MagneticFamily::singular_cyl;
}

PotentialSpec linear_magnetic_spec(int n, double extent, double field_scale) {
  PotentialSpec s;
  s.dim = n;
  s.magnetic = MagneticFamily::linear_M;
  s.matrix = build_M(n).scaled(field_scale);
  s.taper = Taper{0.8 * extent, 0.95 * extent};
  return s;
}

// ---------------------------------------------------------------- points

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

void require_dim(const PotentialSpec& spec, std::span<const double> x) {
  if (static_cast<int>(x.size()) != spec.dim) throw PotentialError("point dimension does not match the potential");
}

void reject_custom_magnetic(const PotentialSpec& spec) {
  if (spec.magnetic == MagneticFamily::custom_sampled) {
    throw PotentialError("custom_sampled magnetic potentials only exist as grid samples");
  }
}

void reject_custom_electric(const PotentialSpec& spec) {
  if (spec.electric == ElectricFamily::custom_sampled) {
    throw PotentialError("custom_sampled electric potentials only exist as grid samples");
  }
}

// Squared regularized denominator for the singular families, or throws when
// the point hits the singular set without regularization.
double singular_denominator(const PotentialSpec& spec, std::span<const double> x) {
  const double base = spec.magnetic == MagneticFamily::singular_r2 ? norm2(x) : x[0] * x[0] + x[1] * x[1];
  const double d = base + spec.epsilon * spec.epsilon;
  if (d == 0.0) throw PotentialError("singular potential evaluated on its singular set with epsilon = 0");
  return d;
}

bool on_singular_set(const PotentialSpec& spec, std::span<const double> x) {
  if (spec.epsilon > 0.0) return false;
  if (spec.magnetic == MagneticFamily::singular_r2) return norm2(x) == 0.0;
  if (spec.magnetic == MagneticFamily::singular_cyl) return x[0] * x[0] + x[1] * x[1] == 0.0;
  return false;
}

AntisymMatrix matrix_from_curl(double c1, double c2, double c3) {
  AntisymMatrix b(3);
  b.set(0, 1, -c3);
  b.set(0, 2, c2);
  b.set(1, 2, -c1);
  return b;
}

}  // namespace

std::vector<double> eval_A(const PotentialSpec& spec, std::span<const double> x) {
  require_dim(spec, x);
  reject_custom_magnetic(spec);
  std::vector<double> a(static_cast<std::size_t>(spec.dim), 0.0);
  switch (spec.magnetic) {
    case MagneticFamily::zero:
    case MagneticFamily::custom_sampled: break;
    case MagneticFamily::linear_M: {
      a = spec.matrix->apply(x);
      const double chi = spec.taper ? spec.taper->value(std::sqrt(norm2(x))) : 1.0;
      for (double& v : a) v *= 0.5 * chi;
      break;
    }
    case MagneticFamily::singular_r2:
    case MagneticFamily::singular_cyl: {
      const double f = 1.0 / singular_denominator(spec, x);
      a[0] = -x[1] * f;
      a[1] = x[0] * f;
      break;
    }
  }
  return a;
}

std::vector<std::vector<double>> jacobian_A(const PotentialSpec& spec, std::span<const double> x) {
  require_dim(spec, x);
  reject_custom_magnetic(spec);
  const auto n = static_cast<std::size_t>(spec.dim);
  std::vector<std::vector<double>> jac(n, std::vector<double>(n, 0.0));
  switch (spec.magnetic) {
    case MagneticFamily::zero:
    case MagneticFamily::custom_sampled: break;
    case MagneticFamily::linear_M: {
      const AntisymMatrix& m = *spec.matrix;
      const double r = std::sqrt(norm2(x));
      const double chi = spec.taper ? spec.taper->value(r) : 1.0;
      const double dchi = spec.taper ? spec.taper->derivative(r) : 0.0;
      const std::vector<double> mx = m.apply(x);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double v = 0.5 * chi * m(static_cast<int>(i), static_cast<int>(j));
          if (dchi != 0.0) v += 0.5 * mx[i] * dchi * x[j] / r;
          jac[i][j] = v;
        }
      }
      break;
    }
    case MagneticFamily::singular_r2:
    case MagneticFamily::singular_cyl: {
      const double d = singular_denominator(spec, x);
      const double f = 1.0 / d;
      // grad f = -2 (x, y, z or 0) / d^2
      std::vector<double> grad_f(3, 0.0);
      grad_f[0] = -2.0 * x[0] / (d * d);
      grad_f[1] = -2.0 * x[1] / (d * d);
      if (spec.magnetic == MagneticFamily::singular_r2) grad_f[2] = -2.0 * x[2] / (d * d);
      const double ax[3] = {-x[1], x[0], 0.0};
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) jac[i][j] = ax[i] * grad_f[j];
      }
      jac[0][1] += -f;
      jac[1][0] += f;
      break;
    }
  }
  return jac;
}

double divergence_A(const PotentialSpec& spec, std::span<const double> x) {
  const auto jac = jacobian_A(spec, x);
  double s = 0.0;
  for (std::size_t i = 0; i < jac.size(); ++i) s += jac[i][i];
  return s;
}

AntisymMatrix eval_B(const PotentialSpec& spec, std::span<const double> x) {
  require_dim(spec, x);
  reject_custom_magnetic(spec);
  switch (spec.magnetic) {
    case MagneticFamily::zero:
    case MagneticFamily::custom_sampled: return AntisymMatrix(spec.dim);
    case MagneticFamily::linear_M: {
      const auto jac = jacobian_A(spec, x);
      AntisymMatrix b(spec.dim);
      for (int i = 0; i < spec.dim; ++i) {
        for (int j = i + 1; j < spec.dim; ++j) {
          b.set(i, j, jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                          jac[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
        }
      }
      return b;
    }
    case MagneticFamily::singular_r2: {
      // B v = b x v with b = -2 z (x, y, z) / rho^4, so curl A = -b.
      const double d = singular_denominator(spec, x);
      const double s = 2.0 * x[2] / (d * d);
      return matrix_from_curl(s * x[0], s * x[1], s * x[2]);
    }
    case MagneticFamily::singular_cyl:
      // The field is a delta on the z axis; away from it B vanishes.
      singular_denominator(spec, x);
      return AntisymMatrix(3);
  }
  return AntisymMatrix(spec.dim);
}

std::vector<double> trapping_component(const PotentialSpec& spec, std::span<const double> x) {
  require_dim(spec, x);
  const double r = std::sqrt(norm2(x));
  if (r == 0.0) {
    if (spec.epsilon > 0.0) return std::vector<double>(static_cast<std::size_t>(spec.dim), 0.0);
    throw PotentialError("trapping component is undefined at the origin");
  }
  std::vector<double> bt = eval_B(spec, x).left_apply(x);
  for (double& v : bt) v /= r;
  return bt;
}

double eval_V(const PotentialSpec& spec, std::span<const double> x) {
  require_dim(spec, x);
  reject_custom_electric(spec);
  if (spec.electric == ElectricFamily::inverse_quadratic) return spec.coupling / (1.0 + norm2(x));
  return 0.0;
}

double radial_derivative_V(const PotentialSpec& spec, std::span<const double> x) {
  require_dim(spec, x);
  reject_custom_electric(spec);
  if (spec.electric == ElectricFamily::inverse_quadratic) {
    const double r2 = norm2(x);
    const double q = 1.0 + r2;
    return -2.0 * spec.coupling * std::sqrt(r2) / (q * q);
  }
  return 0.0;
}

// ---------------------------------------------------------------- samplers

namespace {

void require_grid(const PotentialSpec& spec, const Grid& grid) {
  if (grid.dim() != spec.dim) throw PotentialError("grid dimension does not match the potential");
}

template <class Fn>
void for_each_point(const Grid& grid, Fn&& fn) {
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    fn(i, std::span<const double>(x));
  }
}

void require_sample_grid(const Grid& grid, const Grid& samples) {
  if (!(grid == samples)) throw PotentialError("custom samples live on a different grid");
}

// Spectral Jacobian of sampled A: jac[i][j] = d_j A^i.
std::vector<std::vector<RealField>> spectral_jacobian(const VectorField& a) {
  std::vector<std::vector<RealField>> jac;
  for (const auto& comp : a) {
    const ComplexVectorField g = spectral_gradient(to_complex(comp));
    std::vector<RealField> row;
    for (const auto& gj : g) {
      RealField f(gj.grid());
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = gj[i].real();
      row.push_back(std::move(f));
    }
    jac.push_back(std::move(row));
  }
  return jac;
}

// Second-order centered differences, periodic wrap.
VectorField centered_gradient(const RealField& f) {
  const Grid& g = f.grid();
  const int n = g.dim();
  const int npts = g.points();
  const double inv2h = 0.5 / g.spacing();
  VectorField out;
  for (int a = 0; a < n; ++a) {
    const std::size_t stride = std::size_t{1} << (std::countr_zero(static_cast<unsigned>(npts)) * (n - 1 - a));
    RealField d(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const int idx = g.axis_index(i, a);
      const std::size_t base = i - static_cast<std::size_t>(idx) * stride;
      const std::size_t ip = base + static_cast<std::size_t>((idx + 1) % npts) * stride;
      const std::size_t im = base + static_cast<std::size_t>((idx + npts - 1) % npts) * stride;
      d[i] = (f[ip] - f[im]) * inv2h;
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

VectorField sample_A(const PotentialSpec& spec, const Grid& grid) {
  spec.validate();
  require_grid(spec, grid);
  if (spec.magnetic == MagneticFamily::custom_sampled) {
    for (const auto& c : *spec.custom_A) require_sample_grid(grid, c.grid());
    return *spec.custom_A;
  }
  VectorField a(static_cast<std::size_t>(spec.dim), RealField(grid));
  if (spec.magnetic == MagneticFamily::zero) return a;
  for_each_point(grid, [&](std::size_t i, std::span<const double> x) {
    const auto v = eval_A(spec, x);
    for (std::size_t c = 0; c < v.size(); ++c) a[c][i] = v[c];
  });
  return a;
}

RealField sample_V(const PotentialSpec& spec, const Grid& grid) {
  spec.validate();
  require_grid(spec, grid);
  if (spec.electric == ElectricFamily::custom_sampled) {
    require_sample_grid(grid, spec.custom_V->grid());
    return *spec.custom_V;
  }
  RealField v(grid);
  if (spec.electric == ElectricFamily::zero) return v;
  for_each_point(grid, [&](std::size_t i, std::span<const double> x) { v[i] = eval_V(spec, x); });
  return v;
}

std::vector<double> sample_B(const PotentialSpec& spec, const Grid& grid) {
  spec.validate();
  require_grid(spec, grid);
  const auto n = static_cast<std::size_t>(spec.dim);
  std::vector<double> out(grid.size() * n * n, 0.0);
  if (spec.magnetic == MagneticFamily::zero) return out;
  if (spec.magnetic == MagneticFamily::custom_sampled) {
    const auto jac = spectral_jacobian(sample_A(spec, grid));
    for (std::size_t p = 0; p < grid.size(); ++p) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out[p * n * n + i * n + j] = jac[i][j][p] - jac[j][i][p];
      }
    }
    return out;
  }
  for_each_point(grid, [&](std::size_t p, std::span<const double> x) {
    if (on_singular_set(spec, x)) return;
    const AntisymMatrix b = eval_B(spec, x);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out[p * n * n + i * n + j] = b(static_cast<int>(i), static_cast<int>(j));
    }
  });
  return out;
}

VectorField sample_weighted_trapping(const PotentialSpec& spec, const Grid& grid) {
  spec.validate();
  require_grid(spec, grid);
  const auto n = static_cast<std::size_t>(spec.dim);
  VectorField w(n, RealField(grid));
  if (spec.trapping_free()) return w;
  const std::vector<double> b = sample_B(spec, grid);
  for_each_point(grid, [&](std::size_t p, std::span<const double> x) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += x[i] * b[p * n * n + i * n + j];
      w[j][p] = s;
    }
  });
  return w;
}

RealField sample_weighted_radial_dV(const PotentialSpec& spec, const Grid& grid) {
  spec.validate();
  require_grid(spec, grid);
  RealField out(grid);
  switch (spec.electric) {
    case ElectricFamily::zero: break;
    case ElectricFamily::inverse_quadratic:
      for_each_point(grid, [&](std::size_t i, std::span<const double> x) {
        const double r2 = norm2(x);
        const double q = 1.0 + r2;
        out[i] = -2.0 * spec.coupling * r2 / (q * q);
      });
      break;
    case ElectricFamily::custom_sampled: {
      const VectorField grad = centered_gradient(sample_V(spec, grid));
      for_each_point(grid, [&](std::size_t i, std::span<const double> x) {
        double s = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) s += x[a] * grad[a][i];
        out[i] = s;
      });
      break;
    }
  }
  return out;
}

double check_coulomb_gauge(const PotentialSpec& spec, const Grid& grid) {
  spec.validate();
  require_grid(spec, grid);
  double worst = 0.0;
  if (spec.magnetic == MagneticFamily::zero) return 0.0;
  if (spec.magnetic == MagneticFamily::custom_sampled) {
    const VectorField& a = *spec.custom_A;
    const int npts = grid.points();
    const int n = grid.dim();
    const double inv2h = 0.5 / grid.spacing();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      bool interior = true;
      for (int ax = 0; ax < n && interior; ++ax) {
        const int idx = grid.axis_index(i, ax);
        interior = idx > 0 && idx < npts - 1;
      }
      if (!interior) continue;
      double div = 0.0;
      for (int ax = 0; ax < n; ++ax) {
        const std::size_t stride = std::size_t{1} << (std::countr_zero(static_cast<unsigned>(npts)) * (n - 1 - ax));
        div += (a[static_cast<std::size_t>(ax)][i + stride] - a[static_cast<std::size_t>(ax)][i - stride]) * inv2h;
      }
      worst = std::max(worst, std::abs(div));
    }
    return worst;
  }
  for_each_point(grid, [&](std::size_t, std::span<const double> x) {
    if (on_singular_set(spec, x)) return;
    worst = std::max(worst, std::abs(divergence_A(spec, x)));
  });
  return worst;
}

// ---------------------------------------------------------------- norms

double kato_threshold(int n) {
  if (n < 3) throw PotentialError("the Kato threshold needs n >= 3");
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n - 1.0);
}

double kato_norm(const RealField& V, double radius) {
  const Grid& g = V.grid();
  const int n = g.dim();
  if (n < 3) throw PotentialError("the Kato norm needs n >= 3");
  if (!(radius > 0.0) || radius > g.extent()) throw PotentialError("Kato radius must lie in (0, R]");
  const int npts = g.points();
  const double h = g.spacing();
  ComplexField kernel(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double d2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const int idx = g.axis_index(i, a);
      const int m = idx < npts / 2 ? idx : idx - npts;
      d2 += static_cast<double>(m) * m;
    }
    const double d = std::sqrt(d2) * h;
    if (d > 0.0 && d <= radius) kernel[i] = 1.0 / std::pow(d, n - 2);
  }
  ComplexField v(g);
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::abs(V[i]);
  g.forward(kernel.data(), kernel.data());
  g.forward(v.data(), v.data());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] *= kernel[i];
  g.inverse(v.data(), v.data());
  double worst = 0.0;
  for (const cplx& z : v.values()) worst = std::max(worst, z.real());
  return worst * g.cell_volume();
}

double kato_norm(const PotentialSpec& spec, const Grid& grid, double radius) {
  return kato_norm(sample_V(spec, grid), radius);
}

double radial_tangential_norm(const RealField& f) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  const double rmax = g.extent() * std::sqrt(static_cast<double>(g.dim())) + h;
  std::vector<double> shell_sup(static_cast<std::size_t>(rmax / h) + 2, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto s = static_cast<std::size_t>(std::sqrt(g.radius_squared(i)) / h);
    shell_sup[s] = std::max(shell_sup[s], std::abs(f[i]));
  }
  double total = 0.0;
  for (double v : shell_sup) total += v;
  return total * h;
}

double strichartz_high_dim_threshold(int n) { return 2.0 * (n - 1) * (n - 3) / 3.0; }

double strichartz_n3_coefficient(double m) {
  if (!(m > 0.0)) throw PotentialError("Strichartz parameter M must be positive");
  return (m + 0.5) * (m + 0.5) / m;
}

const InequalityCheck& AssumptionReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no check named " + name);
}

bool AssumptionReport::all_smallness_pass() const {
  for (const auto& c : checks) {
    const bool smallness = c.name == "kato" || c.name.rfind("strichartz", 0) == 0;
    if (smallness && c.applicable && !c.pass) return false;
  }
  return true;
}

AssumptionReport hypothesis_report(const PotentialSpec& spec, const Grid& grid, const HypothesisParams& params) {
  spec.validate();
  require_grid(spec, grid);
  const int n = spec.dim;
  AssumptionReport rep;
  rep.dim = n;
  rep.kato_radius = params.kato_radius > 0.0 ? params.kato_radius : 0.25 * grid.extent();

  const VectorField wt = sample_weighted_trapping(spec, grid);
  const RealField wdv = sample_weighted_radial_dV(spec, grid);
  const RealField V = sample_V(spec, grid);
  const std::vector<double> bfield = sample_B(spec, grid);
  const auto nn = static_cast<std::size_t>(n * n);

  RealField x3_trap(grid), x3_field(grid), x2_dv(grid);
  rep.condition_i_min = std::numeric_limits<double>::infinity();
  rep.V_min = std::numeric_limits<double>::infinity();
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    if (on_singular_set(spec, x)) continue;
    const double r = std::sqrt(grid.radius_squared(i));
    double w2 = 0.0;
    for (const auto& c : wt) w2 += c[i] * c[i];
    const double w = std::sqrt(w2);  // |x| |B_tau|
    double bf2 = 0.0;
    for (std::size_t e = 0; e < nn; ++e) bf2 += bfield[i * nn + e] * bfield[i * nn + e];
    const double bnorm = std::sqrt(0.5 * bf2);  // equals |curl A| when n = 3
    const double dv_plus = std::max(wdv[i], 0.0);  // |x| (dV/dr)_+
    rep.sup_x2_trapping = std::max(rep.sup_x2_trapping, r * w);
    rep.sup_x32_trapping = std::max(rep.sup_x32_trapping, std::sqrt(r) * w);
    rep.sup_x3_radial_dV_plus = std::max(rep.sup_x3_radial_dV_plus, r * r * dv_plus);
    x3_trap[i] = r * r * w;
    x3_field[i] = r * r * r * bnorm;
    x2_dv[i] = r * dv_plus;
    rep.condition_i_min = std::min(rep.condition_i_min, V[i] + 0.5 * wdv[i]);
    rep.V_min = std::min(rep.V_min, V[i]);
  }
  rep.rt_x3_trapping = radial_tangential_norm(x3_trap);
  rep.rt_x3_field = radial_tangential_norm(x3_field);
  rep.rt_x2_radial_dV_plus = radial_tangential_norm(x2_dv);
  rep.coulomb_residual = check_coulomb_gauge(spec, grid);

  auto add = [&](std::string name, std::string rel, bool applicable, double lhs, double rhs) {
    bool pass = false;
    if (rel == "<") pass = lhs < rhs;
    else if (rel == "<=") pass = lhs <= rhs;
    else pass = lhs >= rhs;
    rep.checks.push_back({std::move(name), std::move(rel), applicable, lhs, rhs, applicable && pass});
  };

  if (n >= 3) {
    RealField v_minus(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) v_minus[i] = std::max(-V[i], 0.0);
    rep.kato_norm_V_minus = kato_norm(v_minus, std::min(rep.kato_radius, grid.extent()));
    rep.kato_threshold = kato_threshold(n);
    add("kato", "<", true, *rep.kato_norm_V_minus, *rep.kato_threshold);
  } else {
    add("kato", "<", false, 0.0, 0.0);
  }

  const double coeff = strichartz_n3_coefficient(params.strichartz_m);
  add("strichartz_schrodinger_n3", "<", n == 3,
      coeff * rep.sup_x32_trapping * rep.sup_x32_trapping +
          (2.0 * params.strichartz_m + 1.0) * rep.rt_x2_radial_dV_plus,
      0.5);
  add("strichartz_schrodinger_high_dim", "<", n >= 4,
      rep.sup_x2_trapping * rep.sup_x2_trapping + 2.0 * rep.sup_x3_radial_dV_plus,
      strichartz_high_dim_threshold(n));
  add("strichartz_wave_n3", "<=", n == 3, rep.rt_x3_trapping + rep.rt_x2_radial_dV_plus, 0.5);
  add("strichartz_wave_high_dim", "<=", n >= 4,
      rep.sup_x2_trapping * rep.sup_x2_trapping + 2.0 * rep.sup_x3_radial_dV_plus,
      strichartz_high_dim_threshold(n));
  add("coulomb_gauge", "<=", true, rep.coulomb_residual, 1e-10);
  add("schrodinger_condition_i", ">=", true, rep.condition_i_min, 0.0);
  add("wave_condition_i", ">=", true, rep.V_min, 0.0);
  return rep;
}

}  // namespace magvirial
