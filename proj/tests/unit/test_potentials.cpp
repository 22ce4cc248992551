#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "magvirial/oracle.hpp"
#include "magvirial/potentials.hpp"

using namespace magvirial;
using std::numbers::pi;

namespace {

PotentialSpec linear(int n, double scale = 1.0) {
  PotentialSpec s;
  s.dim = n;
  s.magnetic = MagneticFamily::linear_M;
  s.matrix = build_M(n).scaled(scale);
  return s;
}

PotentialSpec singular(MagneticFamily f, double eps) {
  PotentialSpec s;
  s.dim = 3;
  s.magnetic = f;
  s.epsilon = eps;
  return s;
}

PotentialSpec electric(int n, double c) {
  PotentialSpec s;
  s.dim = n;
  s.electric = ElectricFamily::inverse_quadratic;
  s.coupling = c;
  return s;
}

}  // namespace

TEST(BuildM, SmallDimensions) {
  EXPECT_EQ(build_M(2).rows(), (std::vector<std::vector<double>>{{0, -1}, {1, 0}}));
  EXPECT_EQ(build_M(3).rows(), (std::vector<std::vector<double>>{{0, -1, 0}, {1, 0, 0}, {0, 0, 0}}));
  EXPECT_EQ(build_M(4).rows(),
            (std::vector<std::vector<double>>{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}));
  const auto m6 = build_M(6).rows();
  EXPECT_EQ(m6[2][3], -1.0);
  EXPECT_EQ(m6[3][2], 1.0);
  EXPECT_EQ(m6[4][5], 0.0);
  const auto m5 = build_M(5).rows();
  EXPECT_EQ(m5[2][3], -1.0);
  EXPECT_EQ(m5[4][4], 0.0);
}

TEST(AntisymMatrix, RejectsNonAntisymmetricRows) {
  EXPECT_THROW(AntisymMatrix::from_rows({{0, 1}, {1, 0}}), PotentialError);
  EXPECT_THROW(AntisymMatrix::from_rows({{1, 0}, {0, 0}}), PotentialError);
  EXPECT_THROW(AntisymMatrix::from_rows({{0, 1, 0}, {-1, 0}}), PotentialError);
  EXPECT_NO_THROW(AntisymMatrix::from_rows({{0, 2}, {-2, 0}}));
}

TEST(EvalA, LinearAndSingular) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_EQ(eval_A(linear(3), x), (std::vector<double>{-1, 0.5, 0}));
  const double b = 2.5;
  const auto a = eval_A(linear(3, b), x);
  EXPECT_DOUBLE_EQ(a[0], b / 2 * -2);
  EXPECT_DOUBLE_EQ(a[1], b / 2 * 1);
  EXPECT_EQ(a[2], 0.0);
  const auto s = eval_A(singular(MagneticFamily::singular_r2, 0.0), std::vector<double>{1, 0, 0});
  EXPECT_NEAR(s[0], 0.0, 1e-15);
  EXPECT_NEAR(s[1], 1.0, 1e-15);
  EXPECT_NEAR(s[2], 0.0, 1e-15);
}

TEST(EvalB, LinearIsConstantM) {
  const auto spec = linear(3);
  for (const auto& x : {std::vector<double>{1, 2, 3}, std::vector<double>{-0.5, 4, 1}}) {
    const AntisymMatrix B = eval_B(spec, x);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) EXPECT_EQ(B(i, j), build_M(3)(i, j));
    }
  }
}

TEST(EvalB, TrappingComponentOfOmega2) {
  const auto bt = trapping_component(linear(2), std::vector<double>{1, 0});
  EXPECT_DOUBLE_EQ(bt[0], 0.0);
  EXPECT_DOUBLE_EQ(bt[1], -1.0);
}

TEST(EvalB, SingularFieldIsRadialAndUntrapped) {
  const auto spec = singular(MagneticFamily::singular_r2, 0.0);
  const std::vector<double> x{0.3, -0.7, 1.1};
  const double r2 = 0.09 + 0.49 + 1.21;
  const AntisymMatrix B = eval_B(spec, x);
  // curl A = 2z x / r^4.
  const double c = 2.0 * x[2] / (r2 * r2);
  EXPECT_NEAR(B(2, 1), c * x[0], 1e-13);
  EXPECT_NEAR(B(0, 2), c * x[1], 1e-13);
  EXPECT_NEAR(B(1, 0), c * x[2], 1e-13);
  for (double v : trapping_component(spec, x)) EXPECT_NEAR(v, 0.0, 1e-14);
  // Cross-check the closed form against a finite-difference Jacobian.
  const double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      auto xp = x, xm = x;
      xp[static_cast<std::size_t>(j)] += h;
      xm[static_cast<std::size_t>(j)] -= h;
      const double dij = (eval_A(spec, xp)[static_cast<std::size_t>(i)] - eval_A(spec, xm)[static_cast<std::size_t>(i)]) / (2 * h);
      auto xp2 = x, xm2 = x;
      xp2[static_cast<std::size_t>(i)] += h;
      xm2[static_cast<std::size_t>(i)] -= h;
      const double dji = (eval_A(spec, xp2)[static_cast<std::size_t>(j)] - eval_A(spec, xm2)[static_cast<std::size_t>(j)]) / (2 * h);
      EXPECT_NEAR(B(i, j), dij - dji, 1e-7);
    }
  }
}

TEST(EvalB, CylindricalFieldVanishes) {
  const auto spec = singular(MagneticFamily::singular_cyl, 0.0);
  const AntisymMatrix B = eval_B(spec, std::vector<double>{0.4, 1.2, -2.0});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(B(i, j), 0.0, 1e-14);
  }
}

TEST(Spec, Validation) {
  PotentialSpec s = singular(MagneticFamily::singular_r2, 0.1);
  s.dim = 2;
  EXPECT_THROW(s.validate(), PotentialError);
  PotentialSpec l = linear(3);
  l.matrix = build_M(2);
  EXPECT_THROW(l.validate(), PotentialError);
  PotentialSpec e = singular(MagneticFamily::singular_r2, -1.0);
  EXPECT_THROW(e.validate(), PotentialError);
  PotentialSpec t = singular(MagneticFamily::singular_r2, 0.1);
  t.taper = Taper{1.0, 2.0};
  EXPECT_THROW(t.validate(), PotentialError);
}

TEST(Electric, RadialDerivativeAndConditionI) {
  PotentialSpec zero;
  zero.dim = 3;
  EXPECT_EQ(radial_derivative_V(zero, std::vector<double>{1, 2, 3}), 0.0);
  const double c = 0.7;
  const auto spec = electric(3, c);
  const std::vector<double> x{1.0, -2.0, 0.5};
  const double r2 = 1 + 4 + 0.25, r = std::sqrt(r2), q = 1 + r2;
  EXPECT_NEAR(radial_derivative_V(spec, x), -2 * c * r / (q * q), 1e-15);
  EXPECT_NEAR(eval_V(spec, x) + 0.5 * r * radial_derivative_V(spec, x), c / (q * q), 1e-15);
}

TEST(Coulomb, Residuals) {
  const Grid g(3, 5.0, 16);
  EXPECT_EQ(check_coulomb_gauge(linear(3), g), 0.0);
  EXPECT_LE(check_coulomb_gauge(singular(MagneticFamily::singular_r2, 2 * g.spacing()), g), 1e-12);
  PotentialSpec custom;
  custom.dim = 3;
  custom.magnetic = MagneticFamily::custom_sampled;
  VectorField A(3, RealField(g));
  for (std::size_t i = 0; i < g.size(); ++i) A[0][i] = g.coordinate(g.axis_index(i, 0));
  custom.custom_A = std::make_shared<const VectorField>(A);
  EXPECT_NEAR(check_coulomb_gauge(custom, g), 1.0, 1e-12);
}

TEST(Taper, ReducesDivergenceFreeField) {
  const Grid g(2, 10.0, 64);
  PotentialSpec s = linear_magnetic_spec(2, 10.0);
  ASSERT_TRUE(s.taper);
  EXPECT_DOUBLE_EQ(s.taper->inner, 8.0);
  EXPECT_DOUBLE_EQ(s.taper->outer, 9.5);
  EXPECT_LT(check_coulomb_gauge(s, g), 1e-12);
  // Outside the taper A vanishes, so the sampled field is periodic.
  EXPECT_EQ(eval_A(s, std::vector<double>{9.6, 0.0})[1], 0.0);
  // Inside it is exactly M x / 2.
  EXPECT_EQ(eval_A(s, std::vector<double>{2.0, 0.0})[1], 1.0);
}

TEST(Kato, ZeroBallAndThreshold) {
  const Grid g(3, 10.0, 32);
  EXPECT_EQ(kato_norm(RealField(g), 2.5), 0.0);
  EXPECT_NEAR(kato_threshold(3), pi, 1e-14);
  EXPECT_NEAR(kato_threshold(4), pi * pi, 1e-13);
  EXPECT_NEAR(oracle::kato_ball_value(3, 1.5), 2 * pi * 2.25, 1e-13);
  const RealField bump = sample<double>(g, [](std::span<const double> x) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= 4.0 ? -0.5 : 0.0;
  });
  std::size_t center = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.radius_squared(i) == 0.0) center = i;
  }
  EXPECT_NEAR(kato_norm(bump, 3.0), oracle::kato_sum_at(bump, center, 3.0), 1e-9);
}

TEST(Hypotheses, Thresholds) {
  EXPECT_EQ(strichartz_high_dim_threshold(4), 2.0);
  EXPECT_EQ(strichartz_high_dim_threshold(5), 16.0 / 3.0);
  EXPECT_EQ(strichartz_high_dim_threshold(6), 10.0);
  EXPECT_DOUBLE_EQ(strichartz_n3_coefficient(1.0), 2.25);
}

TEST(Hypotheses, SingularSpecPassesSmallness) {
  const Grid g(3, 10.0, 32);
  const AssumptionReport r = hypothesis_report(singular(MagneticFamily::singular_r2, 2 * g.spacing()), g);
  EXPECT_TRUE(r.all_smallness_pass());
  EXPECT_LT(r.sup_x2_trapping, 1e-12);
  EXPECT_LT(r.rt_x3_trapping, 1e-12);
}

TEST(Hypotheses, LinearFieldFailsSmallness) {
  const Grid g(3, 10.0, 32);
  const AssumptionReport r = hypothesis_report(linear_magnetic_spec(3, 10.0), g);
  EXPECT_GT(r.sup_x2_trapping, 1.0);
  EXPECT_FALSE(r.check("strichartz_schrodinger_n3").pass);
}

TEST(Hypotheses, StrongNegativeBumpFailsKato) {
  const Grid g(3, 10.0, 32);
  PotentialSpec weak = electric(3, -0.01);
  PotentialSpec strong = electric(3, -5.0);
  HypothesisParams p;
  p.kato_radius = 2.5;
  EXPECT_TRUE(hypothesis_report(weak, g, p).check("kato").pass);
  const AssumptionReport r = hypothesis_report(strong, g, p);
  EXPECT_FALSE(r.check("kato").pass);
  EXPECT_GT(*r.kato_norm_V_minus, *r.kato_threshold);
}

TEST(Hypotheses, HighDimensionReport) {
  const Grid g(4, 10.0, 16);
  const AssumptionReport r = hypothesis_report(linear_magnetic_spec(4, 10.0), g);
  EXPECT_EQ(r.check("strichartz_schrodinger_high_dim").rhs, 2.0);
}
