#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "magvirial/diagnostics.hpp"
#include "magvirial/dynamics.hpp"

using namespace magvirial;
using std::numbers::pi;

namespace {

ComplexField chirped(const Grid& g, double a, double beta) {
  return sample<cplx>(g, [=](std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return a * std::exp(cplx(-0.5 * r2, beta * r2));
  });
}

DiscreteHamiltonian free_hamiltonian(const Grid& g) {
  PotentialSpec s;
  s.dim = g.dim();
  return DiscreteHamiltonian(s, g);
}

TimeSeries synthetic(double q0, double qdot0, double c, double rhs, int n = 21, double dt = 0.05) {
  TimeSeries ts;
  for (int k = 0; k < n; ++k) {
    DiagnosticsRecord r;
    r.t = k * dt;
    r.Q = q0 + qdot0 * r.t + 0.5 * c * r.t * r.t;
    r.Qddot_rhs = rhs;
    ts.records.push_back(r);
  }
  return ts;
}

}  // namespace

TEST(Variance, GaussianMoments) {
  const Grid g(2, 12.0, 128);
  EXPECT_NEAR(variance_Q(chirped(g, 1.0, 0.0)), pi, 1e-12);
  EXPECT_NEAR(variance_Q(chirped(g, 2.0, 0.3)), 4 * pi, 1e-11);
  const Grid g3(3, 10.0, 64);
  EXPECT_NEAR(variance_Q(chirped(g3, 1.0, 0.0)), 1.5 * std::pow(pi, 1.5), 1e-9);
}

TEST(Variance, ChirpDrivesQdot) {
  const Grid g(2, 12.0, 128);
  const DiscreteHamiltonian H = free_hamiltonian(g);
  EXPECT_NEAR(q_dot_nls(chirped(g, 1.0, 0.0), H), 0.0, 1e-12);
  for (double beta : {0.1, -0.25}) EXPECT_NEAR(q_dot_nls(chirped(g, 1.0, beta), H), 8 * pi * beta, 1e-9);
}

TEST(Virial, FreeGaussianSecondDerivative) {
  const Grid g(2, 12.0, 128);
  const DiscreteHamiltonian H = free_hamiltonian(g);
  EXPECT_NEAR(q_ddot_rhs_nls(chirped(g, 1.0, 0.0), H, 3.0, 0.0), 8 * pi, 1e-10);
  // Mass-critical case: the energy form is 16 E.
  const ComplexField u = chirped(g, 1.7, 0.0);
  const VirialWeights w = VirialWeights::from(H);
  EXPECT_NEAR(q_ddot_energy_form_nls(u, H, w, 3.0), 16 * energy_schrodinger(u, H, 3.0), 1e-10);
}

TEST(Virial, EnergyFormMatchesTermSum) {
  const Grid g(2, 10.0, 64);
  PotentialSpec s = linear_magnetic_spec(2, 10.0);
  s.electric = ElectricFamily::inverse_quadratic;
  s.coupling = 0.5;
  const DiscreteHamiltonian H(s, g);
  const VirialWeights w = VirialWeights::from(H);
  const ComplexField u = random_smooth_field(g, 4, 1.5);
  for (double p : {2.0, 3.0, 4.5}) {
    const double sum = q_ddot_terms_nls(u, H, w, p).sum();
    EXPECT_NEAR(q_ddot_energy_form_nls(u, H, w, p), sum, 1e-10 * std::max(1.0, std::abs(sum)));
  }
}

TEST(Virial, UntrappedFieldHasNoMagneticTerm) {
  const Grid g(3, 8.0, 32);
  PotentialSpec s;
  s.dim = 3;
  s.magnetic = MagneticFamily::singular_r2;
  s.epsilon = 2 * g.spacing();
  const DiscreteHamiltonian H(s, g);
  const VirialWeights w = VirialWeights::from(H);
  const ComplexField u = random_smooth_field(g, 9);
  EXPECT_LT(std::abs(q_ddot_terms_nls(u, H, w, 3.0).magnetic), 1e-12);
  const ComplexField v = random_smooth_field(g, 10);
  EXPECT_LT(std::abs(q_ddot_terms_wave(u, v, H, w, 3.0).magnetic), 1e-12);
}

TEST(Virial, LinearFieldHasMagneticTerm) {
  const Grid g(2, 10.0, 64);
  const DiscreteHamiltonian H(linear_magnetic_spec(2, 10.0), g);
  const VirialWeights w = VirialWeights::from(H);
  EXPECT_GT(std::abs(q_ddot_terms_nls(chirped(g, 1.0, 0.2), H, w, 3.0).magnetic), 1e-3);
}

TEST(Virial, WaveNonlinearCoefficientVanishesAtRoot) {
  const Grid g(3, 8.0, 32);
  const DiscreteHamiltonian H = free_hamiltonian(g);
  const VirialWeights w = VirialWeights::from(H);
  const ComplexField u = chirped(g, 1.0, 0.0);
  const ComplexField v(g);
  // 1 - n (p - 1) / (p + 1) = 0 at p = (n + 1) / (n - 1).
  EXPECT_NEAR(q_ddot_terms_wave(u, v, H, w, 2.0).nonlinear, 0.0, 1e-14);
  EXPECT_LT(q_ddot_terms_wave(u, v, H, w, 3.0).nonlinear, 0.0);
}

TEST(Residual, ExactParabolaHasZeroResidual) {
  const auto res = virial_residual(synthetic(3.0, -1.0, 8.0, 8.0));
  ASSERT_EQ(res.size(), 21u);
  EXPECT_FALSE(res.front());
  EXPECT_FALSE(res.back());
  for (std::size_t k = 1; k + 1 < res.size(); ++k) {
    ASSERT_TRUE(res[k]);
    EXPECT_LT(*res[k], 1e-10);
  }
  const auto off = virial_residual(synthetic(3.0, -1.0, 8.0, 10.0));
  EXPECT_NEAR(*off[5], 0.2, 1e-9);
}

TEST(Residual, SkipsUnevenSpacing) {
  TimeSeries ts = synthetic(1.0, 0.0, 2.0, 2.0, 4);
  ts.records[3].t += 0.01;
  const auto res = virial_residual(ts);
  EXPECT_TRUE(res[1]);
  EXPECT_FALSE(res[2]);
  EXPECT_TRUE(virial_residual(synthetic(1, 0, 2, 2, 2))[0] == std::nullopt);
}

TEST(QuadraticBound, HoldsAndFitsCoefficient) {
  const double E0 = -0.5, Q0 = 4.0;
  // Q falls faster than the bound 8 E0 t^2 + Q0.
  const TimeSeries ts = synthetic(Q0, 0.0, 2 * 8.8 * E0, 0.0);
  const QuadraticBoundReport r = quadratic_bound_check(ts, E0, 0.0, Q0, true);
  EXPECT_TRUE(r.applicable);
  EXPECT_TRUE(r.holds);
  ASSERT_TRUE(r.parabola_root);
  EXPECT_NEAR(*r.parabola_root, 1.0, 1e-12);
  ASSERT_TRUE(r.fitted_coefficient);
  EXPECT_NEAR(*r.fitted_coefficient, 8.8, 1e-9);
  const QuadraticBoundReport bad = quadratic_bound_check(synthetic(Q0, 0.0, 0.0, 0.0), E0, 0.0, Q0, true);
  EXPECT_FALSE(bad.holds);
  EXPECT_NEAR(*bad.first_violation_t, 0.05, 1e-12);
  const QuadraticBoundReport na = quadratic_bound_check(ts, 0.5, 0.0, Q0, true);
  EXPECT_FALSE(na.applicable);
  EXPECT_TRUE(na.holds);
}

TEST(QuadraticBound, ParabolaRoots) {
  EXPECT_NEAR(*parabola_positive_root(-1.0, 0.0, 4.0), 2.0, 1e-15);
  EXPECT_NEAR(*parabola_positive_root(0.0, -2.0, 4.0), 2.0, 1e-15);
  EXPECT_FALSE(parabola_positive_root(1.0, 0.0, 4.0));
  EXPECT_FALSE(parabola_positive_root(0.0, 0.0, 4.0));
  EXPECT_NEAR(*parabola_positive_root(1.0, -3.0, 2.0), 1.0, 1e-15);
}

TEST(Levine, AlphaAndFunctional) {
  EXPECT_EQ(levine_alpha(3.0), 0.5);
  EXPECT_EQ(levine_alpha(5.0), 1.0);
  const Grid g(3, 8.0, 32);
  const DiscreteHamiltonian H = free_hamiltonian(g);
  const ComplexField u = chirped(g, 1.0, 0.0);
  const ComplexField v(g);
  EXPECT_NEAR(levine_H(u, v, H, 3.0), -covariant_kinetic(u, H) + nonlinear_integral(u, 3.0), 1e-12);
  EXPECT_NEAR(levine_H(u, v, H, 3.0, 0.0), -covariant_kinetic(u, H), 1e-12);
}

TEST(Record, BoundaryFlagAndFields) {
  const Grid g(2, 4.0, 32);
  const DiscreteHamiltonian H = free_hamiltonian(g);
  const VirialWeights w = VirialWeights::from(H);
  const DiagnosticsRecord wide = make_record(0.0, chirped(g, 1.0, 0.0), nullptr, H, w, 3.0, Equation::schrodinger);
  EXPECT_TRUE(wide.flags & kFlagBoundaryMass);
  const Grid big(2, 12.0, 64);
  const DiscreteHamiltonian Hb = free_hamiltonian(big);
  const DiagnosticsRecord r =
      make_record(0.5, chirped(big, 1.0, 0.0), nullptr, Hb, VirialWeights::from(Hb), 3.0, Equation::schrodinger);
  EXPECT_FALSE(r.flags & kFlagBoundaryMass);
  EXPECT_EQ(r.t, 0.5);
  EXPECT_NEAR(r.mass, pi, 1e-12);
  EXPECT_NEAR(r.sup_norm, 1.0, 1e-15);
  EXPECT_TRUE(r.Qdot);
  EXPECT_FALSE(r.F);
}
