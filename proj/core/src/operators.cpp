#include "magvirial/operators.hpp"

#include <cmath>

namespace magvirial {

DiscreteHamiltonian::DiscreteHamiltonian(const PotentialSpec& spec, const Grid& grid)
    : grid_(grid), spec_(spec), A_(sample_A(spec, grid)), V_(sample_V(spec, grid)), A2_(grid) {
  has_magnetic_ = spec.magnetic != MagneticFamily::zero;
  divergence_residual_ = check_coulomb_gauge(spec, grid);
  finish();
}

DiscreteHamiltonian::DiscreteHamiltonian(const Grid& grid, VectorField A, RealField V)
    : grid_(grid), A_(std::move(A)), V_(std::move(V)), A2_(grid) {
  spec_.dim = grid.dim();
  spec_.magnetic = MagneticFamily::custom_sampled;
  spec_.electric = ElectricFamily::custom_sampled;
  spec_.custom_A = std::make_shared<const VectorField>(A_);
  spec_.custom_V = std::make_shared<const RealField>(V_);
  spec_.validate();
  has_magnetic_ = true;
  divergence_residual_ = check_coulomb_gauge(spec_, grid);
  finish();
}

void DiscreteHamiltonian::finish() {
  if (static_cast<int>(A_.size()) != grid_.dim()) {
    throw PotentialError("A must have one component per dimension");
  }
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    double s = 0.0;
    for (const auto& c : A_) s += c[i] * c[i];
    A2_[i] = s;
  }
}

ComplexVectorField covariant_gradient(const ComplexField& u, const DiscreteHamiltonian& H) {
  ComplexVectorField g = spectral_gradient(u);
  if (!H.has_magnetic()) return g;
  const cplx mi(0.0, -1.0);
  for (std::size_t a = 0; a < g.size(); ++a) {
    const RealField& Aa = H.A()[a];
    for (std::size_t i = 0; i < u.size(); ++i) g[a][i] += mi * Aa[i] * u[i];
  }
  return g;
}

ComplexField magnetic_laplacian(const ComplexField& u, const DiscreteHamiltonian& H) {
  ComplexField lap = spectral_laplacian(u);
  if (!H.has_magnetic()) return lap;
  const ComplexVectorField g = spectral_gradient(u);
  for (std::size_t i = 0; i < u.size(); ++i) {
    cplx adotg = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a) adotg += H.A()[a][i] * g[a][i];
    lap[i] += cplx(0.0, -2.0) * adotg - H.A_squared()[i] * u[i];
  }
  return lap;
}

ComplexField magnetic_laplacian_divergence_form(const ComplexField& u, const DiscreteHamiltonian& H) {
  const ComplexVectorField w = covariant_gradient(u, H);
  ComplexField out = spectral_divergence(w);
  const cplx mi(0.0, -1.0);
  for (std::size_t a = 0; a < w.size(); ++a) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] += mi * H.A()[a][i] * w[a][i];
  }
  return out;
}

ComplexField hamiltonian_apply(const ComplexField& u, const DiscreteHamiltonian& H) {
  ComplexField out = magnetic_laplacian(u, H);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = -out[i] + H.V()[i] * u[i];
  return out;
}

double covariant_kinetic(const ComplexField& u, const DiscreteHamiltonian& H) {
  double s = 0.0;
  for (const auto& c : covariant_gradient(u, H)) s += mass(c);
  return s;
}

double potential_energy(const ComplexField& u, const DiscreteHamiltonian& H) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += H.V()[i] * std::norm(u[i]);
  return s * u.grid().cell_volume();
}

double nonlinear_integral(const ComplexField& u, double p) {
  double s = 0.0;
  const double half = 0.5 * (p + 1.0);
  for (const cplx& z : u.values()) s += std::pow(std::norm(z), half);
  return s * u.grid().cell_volume();
}

double energy_schrodinger(const ComplexField& u, const DiscreteHamiltonian& H, double p, double strength) {
  if (!(p > 1.0)) throw std::invalid_argument("nonlinearity exponent must exceed 1");
  return 0.5 * covariant_kinetic(u, H) + 0.5 * potential_energy(u, H) -
         strength * nonlinear_integral(u, p) / (p + 1.0);
}

double energy_wave(const ComplexField& u, const ComplexField& v, const DiscreteHamiltonian& H, double p,
                   double strength) {
  return 0.5 * mass(v) + energy_schrodinger(u, H, p, strength);
}

double h1A_norm(const ComplexField& u, const DiscreteHamiltonian& H) {
  return std::sqrt(mass(u) + covariant_kinetic(u, H));
}

}  // namespace magvirial
