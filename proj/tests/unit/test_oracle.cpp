#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "magvirial/dynamics.hpp"
#include "magvirial/oracle.hpp"

using namespace magvirial;
using std::numbers::pi;

TEST(OracleConstants, FreeGaussian) {
  EXPECT_NEAR(oracle::gaussian_free_mass(2), pi, 1e-15);
  EXPECT_NEAR(oracle::gaussian_free_mass(3), std::pow(pi, 1.5), 1e-14);
  EXPECT_NEAR(oracle::gaussian_free_Q(2, 0.0), pi, 1e-15);
  EXPECT_NEAR(oracle::gaussian_free_Q(2, 0.5), 2 * pi, 1e-14);
  EXPECT_NEAR(oracle::gaussian_free_Qddot(2), 8 * pi, 1e-14);
  EXPECT_NEAR(oracle::gaussian_free_Q(3, 1.0), 1.5 * std::pow(pi, 1.5) * 5, 1e-12);
}

TEST(OracleReference, MatchesClosedForm) {
  const Grid g(2, 12.0, 64);
  const oracle::GaussianReference ref = oracle::gaussian_free_reference(g, 0.3);
  EXPECT_NEAR(mass(ref.u), ref.mass, 1e-12);
  EXPECT_NEAR(variance_Q(ref.u), ref.Q, 1e-10);
  EXPECT_NEAR(ref.Q, oracle::gaussian_free_Q(2, 0.3), 1e-14);
}

TEST(OracleStencil, SineDerivativeConvergesAtFourthOrder) {
  const auto error = [](int n) {
    const double h = 2 * pi / n;
    std::vector<cplx> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = std::sin(i * h);
    const auto d = oracle::fd_derivative_line(s, h);
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(d[static_cast<std::size_t>(i)] - std::cos(i * h)));
    return m;
  };
  const double e1 = error(32), e2 = error(64);
  EXPECT_NEAR(e1, std::pow(2 * pi / 32, 4) / 30, 0.05 * e1);
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.05);
}

TEST(OracleDft, MatchesSpectralDerivatives) {
  const Grid g(2, 5.0, 16);
  const ComplexField u = random_smooth_field(g, 2);
  const auto grad = spectral_gradient(u);
  const auto direct = oracle::dft_gradient(u);
  const ComplexField lap = spectral_laplacian(u);
  const ComplexField dlap = oracle::dft_laplacian(u);
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    m = std::max({m, std::abs(grad[0][i] - direct[0][i]), std::abs(grad[1][i] - direct[1][i]),
                  std::abs(lap[i] - dlap[i]) / 10});
  }
  EXPECT_LT(m, 1e-12);
}

TEST(OracleGauge, FieldAndEnergyAreInvariant) {
  const Grid g(2, 10.0, 64);
  PotentialSpec s = linear_magnetic_spec(2, 10.0);
  s.electric = ElectricFamily::inverse_quadratic;
  s.coupling = 1.0;
  const DiscreteHamiltonian H(s, g);
  const RealField psi = random_periodic_field(g, 3, 0.5);
  const ComplexField u = random_smooth_field(g, 1);
  const oracle::GaugePair gp = oracle::gauge_transform(u, H.A(), psi);

  // The spectral curl of A is unchanged by adding a gradient.
  const auto curl = [](const VectorField& A) {
    const auto d0 = spectral_gradient(to_complex(A[0]));
    const auto d1 = spectral_gradient(to_complex(A[1]));
    ComplexField c(A[0].grid());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = d0[1][i] - d1[0][i];
    return c;
  };
  const ComplexField c0 = curl(H.A()), c1 = curl(gp.A);
  double m = 0.0;
  for (std::size_t i = 0; i < c0.size(); ++i) m = std::max(m, std::abs(c0[i] - c1[i]));
  EXPECT_LT(m, 1e-12);

  const DiscreteHamiltonian H2(g, gp.A, H.V());
  EXPECT_NEAR(mass(gp.u), mass(u), 1e-12 * mass(u));
  const double e0 = energy_schrodinger(u, H, 3.0), e1 = energy_schrodinger(gp.u, H2, 3.0);
  EXPECT_NEAR(e0, e1, 1e-9 * std::abs(e0));
}

TEST(OracleSampled, AgreesWithProductionKernels) {
  const Grid g(2, 10.0, 64);
  PotentialSpec s = linear_magnetic_spec(2, 10.0);
  s.electric = ElectricFamily::inverse_quadratic;
  s.coupling = 0.7;
  const DiscreteHamiltonian H(s, g);
  const oracle::SampledPotentials pot{H.A(), H.V(), sample_weighted_trapping(s, g), sample_weighted_radial_dV(s, g)};
  const ComplexField u = random_smooth_field(g, 8);
  const double e = energy_schrodinger(u, H, 3.0);
  EXPECT_NEAR(oracle::energy_schrodinger(u, pot, 3.0), e, 1e-11 * std::abs(e));
  const NlsVirialTerms a = oracle::nls_virial_terms(u, pot, 3.0);
  const NlsVirialTerms b = q_ddot_terms_nls(u, H, VirialWeights::from(H), 3.0);
  EXPECT_NEAR(a.kinetic, b.kinetic, 1e-10 * std::abs(b.kinetic));
  EXPECT_NEAR(a.magnetic, b.magnetic, 1e-10 * std::max(1.0, std::abs(b.magnetic)));
  EXPECT_NEAR(a.radial_potential, b.radial_potential, 1e-10 * std::max(1.0, std::abs(b.radial_potential)));
  EXPECT_NEAR(a.nonlinear, b.nonlinear, 1e-10 * std::abs(b.nonlinear));
}

TEST(OracleKato, BallValueAndDirectSum) {
  EXPECT_NEAR(oracle::kato_ball_value(3, 1.0), 2 * pi, 1e-14);
  const Grid g(3, 4.0, 16);
  const RealField zero(g);
  EXPECT_EQ(oracle::kato_sum_at(zero, 0, 1.0), 0.0);
  // A single unit sample at distance h contributes h^3 / h.
  RealField spike(g);
  spike[1] = 1.0;
  const double h = g.spacing();
  EXPECT_NEAR(oracle::kato_sum_at(spike, 0, 1.5 * h), h * h, 1e-15);
  EXPECT_EQ(oracle::kato_sum_at(spike, 0, 0.5 * h), 0.0);
}
