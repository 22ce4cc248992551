#include "magvirial/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace magvirial::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t stride(const Grid& g, int axis) {
  std::size_t s = 1;
  for (int a = axis + 1; a < g.dim(); ++a) s *= static_cast<std::size_t>(g.points());
  return s;
}

// Flat indices of the first point of every line along `axis`.
std::vector<std::size_t> line_starts(const Grid& g, int axis) {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.axis_index(i, axis) == 0) starts.push_back(i);
  }
  return starts;
}

void check_axis(const Grid& g, int axis) {
  if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("axis out of range");
}

}  // namespace

ComplexVectorField fd_gradient(const ComplexField& u) {
  const Grid& g = u.grid();
  const int N = g.points();
  const double h = g.spacing();
  ComplexVectorField out;
  for (int a = 0; a < g.dim(); ++a) {
    ComplexField d(g);
    const std::size_t s = stride(g, a);
    for (std::size_t start : line_starts(g, a)) {
      auto at = [&](int j) { return u[start + static_cast<std::size_t>((j % N + N) % N) * s]; };
      for (int j = 0; j < N; ++j) {
        d[start + static_cast<std::size_t>(j) * s] =
            (-at(j + 2) + 8.0 * at(j + 1) - 8.0 * at(j - 1) + at(j - 2)) / (12.0 * h);
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

RealField fd_derivative(const RealField& f, int axis) {
  const Grid& g = f.grid();
  check_axis(g, axis);
  ComplexField c(g);
  for (std::size_t i = 0; i < g.size(); ++i) c[i] = f[i];
  const ComplexField d = fd_gradient(c)[static_cast<std::size_t>(axis)];
  RealField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = d[i].real();
  return out;
}

std::vector<cplx> fd_derivative_line(std::span<const cplx> f, double h) {
  const int N = static_cast<int>(f.size());
  if (N < 5) throw std::invalid_argument("the stencil needs at least 5 samples");
  auto at = [&](int j) { return f[static_cast<std::size_t>((j % N + N) % N)]; };
  std::vector<cplx> out(f.size());
  for (int j = 0; j < N; ++j) {
    out[static_cast<std::size_t>(j)] = (-at(j + 2) + 8.0 * at(j + 1) - 8.0 * at(j - 1) + at(j - 2)) / (12.0 * h);
  }
  return out;
}

ComplexField dft_derivative(const ComplexField& u, int axis, int order) {
  const Grid& g = u.grid();
  check_axis(g, axis);
  const int N = g.points();
  const std::size_t s = stride(g, axis);
  const double L = 2.0 * g.extent();
  std::vector<cplx> twiddle(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) twiddle[static_cast<std::size_t>(j)] = std::polar(1.0, -2.0 * kPi * j / N);
  std::vector<cplx> factor(static_cast<std::size_t>(N));
  for (int m = 0; m < N; ++m) {
    const double k = 2.0 * kPi / L * (m < N / 2 ? m : m - N);
    factor[static_cast<std::size_t>(m)] = std::pow(cplx(0.0, k), order);
  }
  ComplexField out(g);
  std::vector<cplx> line(static_cast<std::size_t>(N));
  std::vector<cplx> coef(static_cast<std::size_t>(N));
  for (std::size_t start : line_starts(g, axis)) {
    for (int j = 0; j < N; ++j) line[static_cast<std::size_t>(j)] = u[start + static_cast<std::size_t>(j) * s];
    for (int m = 0; m < N; ++m) {
      cplx c = 0.0;
      for (int j = 0; j < N; ++j) c += line[static_cast<std::size_t>(j)] * twiddle[static_cast<std::size_t>((m * j) % N)];
      coef[static_cast<std::size_t>(m)] = c * factor[static_cast<std::size_t>(m)];
    }
    for (int j = 0; j < N; ++j) {
      cplx v = 0.0;
      for (int m = 0; m < N; ++m) v += coef[static_cast<std::size_t>(m)] * std::conj(twiddle[static_cast<std::size_t>((m * j) % N)]);
      out[start + static_cast<std::size_t>(j) * s] = v / static_cast<double>(N);
    }
  }
  return out;
}

ComplexVectorField dft_gradient(const ComplexField& u) {
  ComplexVectorField out;
  for (int a = 0; a < u.grid().dim(); ++a) out.push_back(dft_derivative(u, a, 1));
  return out;
}

ComplexField dft_laplacian(const ComplexField& u) {
  ComplexField out(u.grid());
  for (int a = 0; a < u.grid().dim(); ++a) {
    const ComplexField d2 = dft_derivative(u, a, 2);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] += d2[i];
  }
  return out;
}

double gaussian_free_mass(int n) { return std::pow(kPi, 0.5 * n); }
double gaussian_free_Q(int n, double t) { return 0.5 * n * std::pow(kPi, 0.5 * n) * (1.0 + 4.0 * t * t); }
double gaussian_free_Qddot(int n) { return 4.0 * n * std::pow(kPi, 0.5 * n); }

GaussianReference gaussian_free_reference(const Grid& grid, double t) {
  const int n = grid.dim();
  const cplx z(1.0, 2.0 * t);
  const cplx pre = std::pow(z, -0.5 * n);
  GaussianReference ref{ComplexField(grid), gaussian_free_mass(n), gaussian_free_Q(n, t), gaussian_free_Qddot(n)};
  for (std::size_t i = 0; i < grid.size(); ++i) ref.u[i] = pre * std::exp(-grid.radius_squared(i) / (2.0 * z));
  return ref;
}

GaugePair gauge_transform(const ComplexField& u, const VectorField& A, const RealField& psi) {
  const Grid& g = u.grid();
  if (static_cast<int>(A.size()) != g.dim()) throw std::invalid_argument("A must have one component per dimension");
  GaugePair out{ComplexField(g), A};
  for (std::size_t i = 0; i < g.size(); ++i) out.u[i] = std::polar(1.0, psi[i]) * u[i];
  const ComplexVectorField dpsi = spectral_gradient(to_complex(psi));
  for (std::size_t a = 0; a < A.size(); ++a) {
    for (std::size_t i = 0; i < g.size(); ++i) out.A[a][i] += dpsi[a][i].real();
  }
  return out;
}

namespace {

struct Sums {
  double kinetic = 0.0, potential = 0.0, nonlinear = 0.0, radial = 0.0, magnetic = 0.0;
};

Sums sums(const ComplexField& u, const SampledPotentials& pot, double p) {
  const Grid& g = u.grid();
  const ComplexVectorField du = dft_gradient(u);
  Sums s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double a2 = std::norm(u[i]);
    for (std::size_t a = 0; a < du.size(); ++a) {
      const cplx cov = du[a][i] - cplx(0.0, pot.A[a][i]) * u[i];
      s.kinetic += std::norm(cov);
      s.magnetic += (u[i] * pot.weighted_trapping[a][i] * std::conj(cov)).imag();
    }
    s.potential += pot.V[i] * a2;
    s.nonlinear += std::pow(std::sqrt(a2), p + 1.0);
    s.radial += pot.weighted_radial_dV[i] * a2;
  }
  const double dv = std::pow(g.spacing(), g.dim());
  s.kinetic *= dv;
  s.potential *= dv;
  s.nonlinear *= dv;
  s.radial *= dv;
  s.magnetic *= dv;
  return s;
}

}  // namespace

NlsVirialTerms nls_virial_terms(const ComplexField& u, const SampledPotentials& pot, double p) {
  const Sums s = sums(u, pot, p);
  const int n = u.grid().dim();
  NlsVirialTerms t;
  t.kinetic = 8.0 * s.kinetic;
  t.radial_potential = -4.0 * s.radial;
  t.magnetic = 8.0 * s.magnetic;
  t.nonlinear = -4.0 * n * (p - 1.0) / (p + 1.0) * s.nonlinear;
  return t;
}

WaveVirialTerms wave_virial_terms(const ComplexField& u, const ComplexField& v, const SampledPotentials& pot,
                                  double p) {
  const Sums s = sums(u, pot, p);
  const int n = u.grid().dim();
  double vm = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) vm += std::norm(v[i]);
  vm *= std::pow(v.grid().spacing(), n);
  WaveVirialTerms t;
  t.kinetic = 2.0 * (vm + s.kinetic);
  t.radial_potential = -2.0 * s.radial;
  t.potential = -2.0 * s.potential;
  t.magnetic = 4.0 * s.magnetic;
  t.nonlinear = 2.0 * (1.0 - n * (p - 1.0) / (p + 1.0)) * s.nonlinear;
  return t;
}

double energy_schrodinger(const ComplexField& u, const SampledPotentials& pot, double p) {
  const Sums s = sums(u, pot, p);
  return 0.5 * s.kinetic + 0.5 * s.potential - s.nonlinear / (p + 1.0);
}

ComplexField hamiltonian_apply(const ComplexField& u, const SampledPotentials& pot) {
  const Grid& g = u.grid();
  const ComplexField lap = dft_laplacian(u);
  const ComplexVectorField du = dft_gradient(u);
  std::vector<ComplexField> A_c;
  for (const auto& c : pot.A) A_c.push_back(to_complex(c));
  ComplexField divA(g);
  for (int a = 0; a < g.dim(); ++a) {
    const ComplexField d = dft_derivative(A_c[static_cast<std::size_t>(a)], a, 1);
    for (std::size_t i = 0; i < g.size(); ++i) divA[i] += d[i];
  }
  ComplexField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx adotg = 0.0;
    double a2 = 0.0;
    for (std::size_t a = 0; a < pot.A.size(); ++a) {
      adotg += pot.A[a][i] * du[a][i];
      a2 += pot.A[a][i] * pot.A[a][i];
    }
    // -(grad - iA).(grad - iA) u = -lap u + 2i A.grad u + i (div A) u + |A|^2 u
    out[i] = -lap[i] + cplx(0.0, 2.0) * adotg + cplx(0.0, divA[i].real()) * u[i] + a2 * u[i] + pot.V[i] * u[i];
  }
  return out;
}

double kato_sum_at(const RealField& V, std::size_t x, double r) {
  const Grid& g = V.grid();
  const int n = g.dim();
  const double L = 2.0 * g.extent();
  std::vector<double> px(static_cast<std::size_t>(n));
  std::vector<double> py(static_cast<std::size_t>(n));
  g.point(x, px);
  double sum = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (j == x) continue;
    g.point(j, py);
    double d2 = 0.0;
    for (std::size_t a = 0; a < px.size(); ++a) {
      double d = py[a] - px[a];
      d -= L * std::round(d / L);
      d2 += d * d;
    }
    const double d = std::sqrt(d2);
    if (d > r) continue;
    sum += std::abs(V[j]) / std::pow(d, n - 2);
  }
  return sum * std::pow(g.spacing(), n);
}

double kato_ball_value(int n, double rho) {
  const double sphere = 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
  return sphere * rho * rho / 2.0;
}

}  // namespace magvirial::oracle
