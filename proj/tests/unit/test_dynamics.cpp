#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "magvirial/dynamics.hpp"

using namespace magvirial;
using std::numbers::pi;

namespace {

SimConfig linear_config(double dt) {
  SimConfig c;
  c.dim = 2;
  c.extent = pi;
  c.points = 16;
  c.strength = 0.0;
  c.dt = dt;
  c.potential.dim = 2;
  return c;
}

// e^{i(2x - y)}; on [-pi, pi)^2 this is a lattice mode with |k|^2 = 5.
ComplexField mode(const Grid& g) {
  return sample<cplx>(g, [](std::span<const double> x) { return std::exp(cplx(0.0, 2 * x[0] - x[1])); });
}

double mode_error(const ComplexField& u, double t) {
  const cplx phase = std::exp(cplx(0.0, -5.0 * t));
  const Grid& g = u.grid();
  const ComplexField ref = mode(g);
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - phase * ref[i]));
  return m;
}

double integrate_mode(double dt, double t_end) {
  const SimConfig c = linear_config(dt);
  const Grid g = c.make_grid();
  const DiscreteHamiltonian H(c.potential, g);
  SimState s{0.0, mode(g), std::nullopt, 0, false};
  const long n = std::lround(t_end / dt);
  for (long i = 0; i < n; ++i) s = rk4_step(s, H, c);
  return mode_error(s.u, s.t);
}

SimConfig gaussian_config() {
  SimConfig c;
  c.dim = 2;
  c.extent = 10.0;
  c.points = 64;
  c.dt = 1e-3;
  c.t_end = 0.05;
  c.potential = linear_magnetic_spec(2, 10.0);
  c.potential.electric = ElectricFamily::inverse_quadratic;
  c.potential.coupling = 0.5;
  c.initial.gaussian.amplitude = 1.0;
  return c;
}

}  // namespace

TEST(Dynamics, ZeroStateStaysZero) {
  SimConfig c = gaussian_config();
  c.initial.kind = InitialData::Kind::zero;
  const RunResult r = run(c);
  EXPECT_EQ(r.termination.kind, TerminationReport::Kind::completed);
  for (const auto& rec : r.series.records) {
    EXPECT_EQ(rec.mass, 0.0);
    EXPECT_EQ(rec.sup_norm, 0.0);
  }
}

TEST(Dynamics, SingleModeOneStepIsFifthOrder) {
  const double e1 = integrate_mode(0.02, 0.02);
  const double e2 = integrate_mode(0.01, 0.01);
  // Local error (5 dt)^5 / 120 to leading order.
  EXPECT_NEAR(e1, std::pow(5 * 0.02, 5) / 120, 0.1 * std::pow(5 * 0.02, 5) / 120);
  EXPECT_NEAR(e1 / e2, 32.0, 2.0);
}

TEST(Dynamics, GlobalOrderIsFour) {
  const double e1 = integrate_mode(0.02, 1.0);
  const double e2 = integrate_mode(0.01, 1.0);
  const double e3 = integrate_mode(0.005, 1.0);
  EXPECT_GE(std::log2(e1 / e2), 3.7);
  EXPECT_GE(std::log2(e2 / e3), 3.7);
}

TEST(Dynamics, TimeReversal) {
  const SimConfig c = gaussian_config();
  const Grid g = c.make_grid();
  const DiscreteHamiltonian H(c.potential, g);
  Integrator integ(H, Equation::schrodinger, c.p, c.dealias);
  SimState s = initial_state(c, g);
  const ComplexField u0 = s.u;
  for (int i = 0; i < 20; ++i) integ.step(s, c.dt);
  for (int i = 0; i < 20; ++i) integ.step(s, -c.dt);
  double m = 0.0;
  for (std::size_t i = 0; i < u0.size(); ++i) m = std::max(m, std::abs(s.u[i] - u0[i]));
  EXPECT_LT(m, 1e-9);
  EXPECT_NEAR(s.t, 0.0, 1e-15);
}

TEST(Dynamics, IntegratorMatchesFreeFunctions) {
  const SimConfig c = gaussian_config();
  const Grid g = c.make_grid();
  const DiscreteHamiltonian H(c.potential, g);
  Integrator integ(H, Equation::schrodinger, c.p, c.dealias);
  SimState a = initial_state(c, g);
  SimState b = a;
  integ.step(a, c.dt);
  b = rk4_step(b, H, c);
  double m = 0.0;
  for (std::size_t i = 0; i < a.u.size(); ++i) m = std::max(m, std::abs(a.u[i] - b.u[i]));
  EXPECT_LT(m, 1e-13);
}

TEST(Dynamics, ShortRunConservesMassAndEnergy) {
  const RunResult r = run(gaussian_config());
  EXPECT_EQ(r.termination.kind, TerminationReport::Kind::completed);
  EXPECT_LT(r.max_mass_drift, 1e-8);
  EXPECT_LT(r.max_energy_drift, 1e-8);
  EXPECT_EQ(r.termination.steps, 50);
}

TEST(Tuner, FindsNegativeEnergyAndIsMonotoneInMargin) {
  SimConfig c = gaussian_config();
  c.initial.gaussian.tune_amplitude = true;
  c.potential = PotentialSpec{};
  c.potential.dim = 2;
  c.tune.margin_fraction = 0.0;
  const double a0 = tune_amplitude_for_negative_energy(c);
  // A = V = 0 gives E = a^2 pi / 2 - a^4 pi / 8, with its root at 2.
  EXPECT_NEAR(a0, 2.0, 1e-9);
  c.tune.margin_fraction = 0.1;
  const double a1 = tune_amplitude_for_negative_energy(c);
  EXPECT_GT(a1, a0);
  const Grid g = c.make_grid();
  const DiscreteHamiltonian H(c.potential, g);
  EXPECT_LT(energy_schrodinger(initial_state(c, g).u, H, 3.0), 0.0);
}

TEST(Tuner, ReportsEmptyBracket) {
  SimConfig c = gaussian_config();
  c.tune.a_hi = 1.0;
  EXPECT_THROW(tune_amplitude_for_negative_energy(c), ConfigError);
  c.initial.kind = InitialData::Kind::zero;
  EXPECT_THROW(tune_amplitude_for_negative_energy(c), ConfigError);
}

TEST(Validation, RejectsBadConfigs) {
  const auto rejects = [](auto&& edit) {
    SimConfig c = gaussian_config();
    edit(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  rejects([](SimConfig& c) { c.p = 1.0; });
  rejects([](SimConfig& c) { c.p = 100.0; c.dim = 3; c.potential.dim = 3; });
  rejects([](SimConfig& c) { c.equation = Equation::wave; });
  rejects([](SimConfig& c) { c.dt = 0.0; });
  rejects([](SimConfig& c) { c.t_end = -1.0; });
  rejects([](SimConfig& c) { c.cadence = 0; });
  rejects([](SimConfig& c) { c.strength = -1.0; });
  rejects([](SimConfig& c) { c.potential.dim = 3; });
  rejects([](SimConfig& c) { c.blowup.sup_factor = 1.0; });
  rejects([](SimConfig& c) { c.initial.gaussian.width = 0.0; });
  rejects([](SimConfig& c) { c.initial.gaussian.center = {1.0}; });
  rejects([](SimConfig& c) { c.points = 100; });
  EXPECT_NO_THROW(gaussian_config().validate());
}

TEST(Validation, UnstableStepIsRejected) {
  SimConfig c = gaussian_config();
  c.dt = 0.5;
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Validation, CriticalityClassification) {
  SimConfig c = gaussian_config();
  EXPECT_TRUE(c.mass_critical_or_supercritical());
  c.p = 2.5;
  EXPECT_FALSE(c.mass_critical_or_supercritical());
}

TEST(InitialData, RandomFieldsAreSeeded) {
  const Grid g(2, 8.0, 32);
  const ComplexField a = random_smooth_field(g, 5);
  const ComplexField b = random_smooth_field(g, 5);
  const ComplexField d = random_smooth_field(g, 6);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_GT(std::abs(a[100] - d[100]), 0.0);
  const RealField p = random_periodic_field(g, 5, 1.0, 2);
  for (double v : p.values()) EXPECT_TRUE(std::isfinite(v));
}

TEST(InitialData, WaveVelocityIsRatioTimesU) {
  SimConfig c;
  c.equation = Equation::wave;
  c.dim = 3;
  c.points = 16;
  c.potential.dim = 3;
  c.initial.velocity_ratio = 0.25;
  const Grid g = c.make_grid();
  const SimState s = initial_state(c, g);
  ASSERT_TRUE(s.v);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ((*s.v)[i], 0.25 * s.u[i]);
}
