#pragma once

// Slow independent references. Nothing here calls the FFT path or the
// operators module, so agreement with the fast code is a real check.

#include <span>
#include <vector>

#include "magvirial/diagnostics.hpp"
#include "magvirial/grid.hpp"

namespace magvirial::oracle {

/// Fourth-order central differences with periodic wrap.
ComplexVectorField fd_gradient(const ComplexField& u);
RealField fd_derivative(const RealField& f, int axis);
/// The same stencil on one periodic line of samples with spacing h.
std::vector<cplx> fd_derivative_line(std::span<const cplx> samples, double h);

/// Spectral derivatives by a direct O(N^2) DFT along each axis line.
ComplexField dft_derivative(const ComplexField& u, int axis, int order = 1);
ComplexVectorField dft_gradient(const ComplexField& u);
ComplexField dft_laplacian(const ComplexField& u);

struct GaussianReference {
  ComplexField u;
  double mass = 0.0;
  double Q = 0.0;
  double Qddot = 0.0;
};

/// Free Schrodinger evolution of exp(-|x|^2 / 2):
/// u(t, x) = (1 + 2it)^(-n/2) exp(-|x|^2 / (2 (1 + 2it))).
GaussianReference gaussian_free_reference(const Grid& grid, double t);
double gaussian_free_mass(int n);
double gaussian_free_Q(int n, double t);
double gaussian_free_Qddot(int n);

struct GaugePair {
  ComplexField u;
  VectorField A;
};

/// (e^{i psi} u, A + grad psi), the gradient taken spectrally.
GaugePair gauge_transform(const ComplexField& u, const VectorField& A, const RealField& psi);

/// Sampled A and V with the weights of the variance identities.
struct SampledPotentials {
  VectorField A;
  RealField V;
  VectorField weighted_trapping;  // |x| B_tau
  RealField weighted_radial_dV;   // |x| dV/dr
};

NlsVirialTerms nls_virial_terms(const ComplexField& u, const SampledPotentials& pot, double p);
WaveVirialTerms wave_virial_terms(const ComplexField& u, const ComplexField& v, const SampledPotentials& pot,
                                  double p);
/// E_S by direct quadrature with DFT derivatives.
double energy_schrodinger(const ComplexField& u, const SampledPotentials& pot, double p);
/// -(grad - iA)^2 u + V u, expanded term by term with DFT derivatives.
ComplexField hamiltonian_apply(const ComplexField& u, const SampledPotentials& pot);

/// sum over lattice points y != x with |x - y| <= r of |V(y)| / |x - y|^(n-2) h^n,
/// evaluated at the single lattice point `x` by direct summation.
double kato_sum_at(const RealField& V, std::size_t x, double r);
/// Continuum value at the center for the indicator of a ball of radius rho:
/// |S^(n-1)| rho^2 / 2.
double kato_ball_value(int n, double rho);

}  // namespace magvirial::oracle
