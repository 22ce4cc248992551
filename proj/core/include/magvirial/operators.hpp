#pragma once

// Covariant calculus for H = -(grad - iA)^2 + V on the periodic lattice and
// the energy functionals built on it.

#include <optional>

#include "magvirial/grid.hpp"
#include "magvirial/potentials.hpp"

namespace magvirial {

/// Sampled (A, V) pair with |A|^2 cached. Immutable after construction.
class DiscreteHamiltonian {
 public:
  DiscreteHamiltonian(const PotentialSpec& spec, const Grid& grid);
  /// Directly from samples; the spec is recorded as custom_sampled.
  DiscreteHamiltonian(const Grid& grid, VectorField A, RealField V);

  const Grid& grid() const noexcept { return grid_; }
  const PotentialSpec& spec() const noexcept { return spec_; }
  const VectorField& A() const noexcept { return A_; }
  const RealField& V() const noexcept { return V_; }
  const RealField& A_squared() const noexcept { return A2_; }
  bool has_magnetic() const noexcept { return has_magnetic_; }
  /// Sup of |div A| as reported by check_coulomb_gauge.
  double divergence_residual() const noexcept { return divergence_residual_; }

 private:
  void finish();

  Grid grid_;
  PotentialSpec spec_;
  VectorField A_;
  RealField V_;
  RealField A2_;
  bool has_magnetic_ = false;
  double divergence_residual_ = 0.0;
};

/// (grad - iA) u, one field per axis.
ComplexVectorField covariant_gradient(const ComplexField& u, const DiscreteHamiltonian& H);
/// Coulomb-gauge expansion Lap u - 2i A.grad u - |A|^2 u.
ComplexField magnetic_laplacian(const ComplexField& u, const DiscreteHamiltonian& H);
/// sum_j (d_j - iA_j)(d_j - iA_j) u; agrees with magnetic_laplacian when div A = 0.
ComplexField magnetic_laplacian_divergence_form(const ComplexField& u, const DiscreteHamiltonian& H);
/// -magnetic_laplacian(u) + V u.
ComplexField hamiltonian_apply(const ComplexField& u, const DiscreteHamiltonian& H);

/// integral |grad_A u|^2.
double covariant_kinetic(const ComplexField& u, const DiscreteHamiltonian& H);
/// integral V |u|^2.
double potential_energy(const ComplexField& u, const DiscreteHamiltonian& H);
/// integral |u|^(p+1).
double nonlinear_integral(const ComplexField& u, double p);

double energy_schrodinger(const ComplexField& u, const DiscreteHamiltonian& H, double p, double strength = 1.0);
double energy_wave(const ComplexField& u, const ComplexField& v, const DiscreteHamiltonian& H, double p,
                   double strength = 1.0);
/// sqrt(||u||^2 + ||grad_A u||^2).
double h1A_norm(const ComplexField& u, const DiscreteHamiltonian& H);

}  // namespace magvirial
