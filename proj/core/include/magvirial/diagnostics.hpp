#pragma once

// Conserved quantities, virial quantities and the blow-up proof inequalities,
// evaluated on recorded states.

#include <optional>
#include <string>
#include <vector>

#include "magvirial/grid.hpp"
#include "magvirial/operators.hpp"

namespace magvirial {

enum class Equation { schrodinger, wave };

std::string to_string(Equation e);
Equation equation_from_string(const std::string& s);

/// |x| B_tau and |x| dV/dr sampled once per run.
struct VirialWeights {
  VectorField weighted_trapping;
  RealField weighted_radial_dV;

  static VirialWeights from(const DiscreteHamiltonian& H);
};

/// The four terms of the variance identity for the Schrodinger flow.
struct NlsVirialTerms {
  double kinetic = 0.0;           // 8 int |grad_A u|^2
  double radial_potential = 0.0;  // -4 int |x| V_r |u|^2
  double magnetic = 0.0;          // 8 Im int |x| u B_tau . conj(grad_A u)
  double nonlinear = 0.0;         // -4 n (p-1)/(p+1) int |u|^(p+1)

  double sum() const noexcept { return kinetic + radial_potential + magnetic + nonlinear; }
};

struct WaveVirialTerms {
  double kinetic = 0.0;           // 2 int |u_t|^2 + |grad_A u|^2
  double radial_potential = 0.0;  // -2 int |x| V_r |u|^2
  double potential = 0.0;         // -2 int V |u|^2
  double magnetic = 0.0;          // 4 Im int |x| u B_tau . conj(grad_A u)
  double nonlinear = 0.0;         // 2 (1 - n (p-1)/(p+1)) int |u|^(p+1)

  double sum() const noexcept { return kinetic + radial_potential + potential + magnetic + nonlinear; }
};

double variance_Q(const ComplexField& u);
double wave_Q(const ComplexField& u, const ComplexField& v, const DiscreteHamiltonian& H);
double q_dot_nls(const ComplexField& u, const DiscreteHamiltonian& H);

NlsVirialTerms q_ddot_terms_nls(const ComplexField& u, const DiscreteHamiltonian& H, const VirialWeights& w,
                                double p, double strength = 1.0);
double q_ddot_rhs_nls(const ComplexField& u, const DiscreteHamiltonian& H, double p, double strength = 1.0);
/// The same second derivative rewritten through the energy:
/// 16 E_S - 8 int V|u|^2 - 4 int |x| V_r |u|^2 + magnetic + (16 - 4n(p-1))/(p+1) int |u|^(p+1).
double q_ddot_energy_form_nls(const ComplexField& u, const DiscreteHamiltonian& H, const VirialWeights& w,
                              double p, double strength = 1.0);

WaveVirialTerms q_ddot_terms_wave(const ComplexField& u, const ComplexField& v, const DiscreteHamiltonian& H,
                                  const VirialWeights& w, double p, double strength = 1.0);
double q_ddot_rhs_wave(const ComplexField& u, const ComplexField& v, const DiscreteHamiltonian& H, double p,
                       double strength = 1.0);

/// Share of the mass in the shell |x| > 0.9 R; zero for the zero field.
double boundary_mass_fraction(const ComplexField& u);

/// -int |grad_A u|^2 - int V|u|^2 + int |u|^(p+1) - (2 alpha + 1) int |u_t|^2.
double levine_H(const ComplexField& u, const ComplexField& v, const DiscreteHamiltonian& H, double p,
                double strength = 1.0);
/// (p - 1) / 4, the root of 2(2 alpha + 1) = p + 1.
double levine_alpha(double p);

enum RecordFlags : unsigned {
  kFlagNone = 0,
  kFlagBoundaryMass = 1u << 0,
  kFlagDiverged = 1u << 1,
};

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double Q = 0.0;
  std::optional<double> Qdot;
  double Qddot_rhs = 0.0;
  std::optional<double> virial_residual;
  double sup_norm = 0.0;
  double h1A = 0.0;
  double boundary_mass_frac = 0.0;
  std::optional<double> F;
  std::optional<double> Fdot;
  std::optional<double> Hfun;

  // Not part of the CSV row.
  NlsVirialTerms nls_terms;
  WaveVirialTerms wave_terms;
  double qddot_energy_form = 0.0;
  std::optional<double> levine_wedge;
  unsigned flags = kFlagNone;
};

struct RunMetadata {
  std::string config_hash;
  Equation equation = Equation::schrodinger;
  int dim = 0;
  double p = 0.0;
  double extent = 0.0;
  int points = 0;
  double dt = 0.0;
  int cadence = 1;
};

struct TimeSeries {
  RunMetadata meta;
  std::vector<DiagnosticsRecord> records;
};

/// Evaluate every per-time diagnostic. `strength` multiplies the nonlinearity
/// (1 is the focusing problem, 0 the linear flow). `v` is u_t and is required for the wave equation.
DiagnosticsRecord make_record(double t, const ComplexField& u, const ComplexField* v, const DiscreteHamiltonian& H,
                              const VirialWeights& w, double p, Equation eq, double boundary_warn = 1e-6,
                              double strength = 1.0);

/// |second difference of Q - Qddot_rhs| / max(1, |Qddot_rhs|) at interior
/// samples; endpoints are empty. Requires uniform spacing.
std::vector<std::optional<double>> virial_residual(const TimeSeries& series);
/// Store virial_residual() into the records.
void fill_virial_residual(TimeSeries& series);

struct QuadraticBoundReport {
  bool applicable = false;
  std::string reason;
  double coefficient = 8.0;
  bool holds = true;
  std::optional<double> first_violation_t;
  double min_margin = 0.0;
  std::vector<double> margins;  // parabola - Q per record
  std::optional<double> parabola_root;
  /// Tightest C with Q(t) <= C E0 t^2 + Qdot0 t + Q0 at every recorded t > 0
  /// (largest when E0 < 0, smallest when E0 > 0).
  std::optional<double> fitted_coefficient;
};

/// Q(t) <= C E0 t^2 + Qdot0 t + Q0 + slack. Integrating Qddot <= 16 E0
/// twice gives C = 8. `applicable` gates the check; when false, only the
/// fitted coefficient is reported.
QuadraticBoundReport quadratic_bound_check(const TimeSeries& series, double E0, double Qdot0, double Q0,
                                           bool applicable, double slack = 0.0, double coefficient = 8.0);

/// Positive root of c t^2 + b t + a, if any.
std::optional<double> parabola_positive_root(double c, double b, double a);

struct LevineReport {
  double alpha = 0.0;
  std::vector<double> F_pow;          // F^-alpha
  std::vector<double> second_diffs;   // interior samples
  std::vector<double> Hfun;
  bool concavity_ok = true;
  double max_second_diff = 0.0;
  std::optional<double> T_bound;      // F(0) / (alpha F'(0)) when F'(0) > 0
};

/// Concavity threshold is `concavity_tol * |F^-alpha(0)|`.
LevineReport levine_diagnostics(const TimeSeries& series, double p, double concavity_tol = 1e-6);

}  // namespace magvirial
