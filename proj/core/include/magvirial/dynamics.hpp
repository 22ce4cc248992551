#pragma once

// Method-of-lines time integration (classical RK4, spectral space
// derivatives) of the focusing magnetic NLS and NLW, with amplitude-based
// blow-up detection.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "magvirial/diagnostics.hpp"
#include "magvirial/grid.hpp"
#include "magvirial/operators.hpp"
#include "magvirial/potentials.hpp"

namespace magvirial {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// a exp(-|x - x0|^2 / (2 sigma^2)) exp(i (xi . x + beta |x - x0|^2)).
struct GaussianData {
  double amplitude = 1.0;
  bool tune_amplitude = false;
  double width = 1.0;
  std::vector<double> center;    // empty means the origin
  std::vector<double> velocity;  // xi; empty means zero
  double chirp = 0.0;            // beta
};

/// Sum of a few Gaussian envelopes with random centers, widths, complex
/// amplitudes and plane-wave phases. Deterministic in `seed`.
ComplexField random_smooth_field(const Grid& grid, std::uint64_t seed, double amplitude = 1.0);
/// Random trigonometric polynomial in the lowest lattice modes; periodic.
RealField random_periodic_field(const Grid& grid, std::uint64_t seed, double amplitude = 1.0, int max_mode = 3);

struct InitialData {
  enum class Kind { zero, gaussian, random, samples };
  Kind kind = Kind::gaussian;
  GaussianData gaussian;
  /// Wave only: u_t(0) = velocity_ratio * u(0) for Gaussian data.
  double velocity_ratio = 0.2;
  /// Kind::random: amplitude scale and seed.
  double random_amplitude = 1.0;
  std::uint64_t seed = 0;
  std::shared_ptr<const ComplexField> samples_u;
  std::shared_ptr<const ComplexField> samples_v;
};

struct BlowupThresholds {
  double sup_factor = 1e3;
  double h1a_factor = 1e4;
  /// Share of spectral mass with some |k_j| > k_max / 2 at which the solution
  /// no longer fits the lattice. Zero disables the trigger.
  double resolution_tail = 1e-4;
};

struct TuneOptions {
  double a_lo = 1e-3;
  double a_hi = 10.0;
  /// Target E < -margin_fraction * (quadratic part of E).
  double margin_fraction = 0.1;
};

struct SimConfig {
  Equation equation = Equation::schrodinger;
  int dim = 2;
  double p = 3.0;
  /// Coefficient of |u|^(p-1) u; 0 gives the linear flow.
  double strength = 1.0;
  PotentialSpec potential;
  double extent = 10.0;
  int points = 128;
  double dt = 1e-3;
  double t_end = 1.0;
  bool dealias = true;
  BlowupThresholds blowup;
  double boundary_warn = 1e-6;
  InitialData initial;
  int cadence = 10;
  TuneOptions tune;

  Grid make_grid() const;
  /// Throws ConfigError.
  void validate() const;
  /// 1 + 4/n <= p, the range where negative energy forces blow-up.
  bool mass_critical_or_supercritical() const noexcept;
};

/// Largest dt * lambda_max accepted for the fixed-step RK4 (its imaginary
/// axis stability limit is 2 sqrt 2).
inline constexpr double kStabilityBound = 2.5;
/// dt * lambda_max for the configured linear operator.
double stability_number(const SimConfig& cfg, const DiscreteHamiltonian& H);

struct SimState {
  double t = 0.0;
  ComplexField u;
  std::optional<ComplexField> v;  // u_t, wave only
  long step = 0;
  bool diverged = false;
};

/// Per-state quantities observed while evaluating the first RK stage.
struct StepMonitor {
  double sup = 0.0;
  double h1A = 0.0;
  double tail_fraction = 0.0;
  bool finite = true;
};

/// Evaluates H u - P(|u|^(p-1) u) with reusable buffers; P is the 2/3
/// projection when dealiasing is on and the identity otherwise.
class RhsEvaluator {
 public:
  RhsEvaluator(const DiscreteHamiltonian& H, double p, bool dealias, double strength = 1.0);

  void apply(const ComplexField& u, ComplexField& out, StepMonitor* monitor = nullptr);

 private:
  const DiscreteHamiltonian* H_;
  double p_;
  bool dealias_;
  double strength_;
  std::vector<double> k2_;
  std::vector<unsigned char> keep_;
  std::vector<unsigned char> tail_;
  std::vector<std::vector<double>> axis_k_;
  ComplexField u_hat_;
  ComplexField scratch_;
  ComplexField local_;
};

/// u_t = -i (H u - P(|u|^(p-1) u)).
ComplexField nls_rhs(const SimState& state, const DiscreteHamiltonian& H, double p, bool dealias = true,
                     double strength = 1.0);
/// (u_t, v_t) = (v, -H u + P(|u|^(p-1) u)).
std::pair<ComplexField, ComplexField> nlw_rhs(const SimState& state, const DiscreteHamiltonian& H, double p,
                                              bool dealias = true, double strength = 1.0);

/// Fixed-step classical RK4 with owned stage buffers.
class Integrator {
 public:
  Integrator(const DiscreteHamiltonian& H, Equation eq, double p, bool dealias, double strength = 1.0);

  /// Advances by dt (which may be negative) and returns the monitor of the
  /// state before the step.
  StepMonitor step(SimState& state, double dt);
  StepMonitor observe(const SimState& state);

 private:
  void rhs(const ComplexField& u, const ComplexField* v, ComplexField& du, ComplexField* dv, StepMonitor* mon);

  const DiscreteHamiltonian* H_;
  Equation eq_;
  RhsEvaluator eval_;
  ComplexField ku_, kv_, yu_, yv_, accu_, accv_, op_;
};

SimState rk4_step(const SimState& state, const DiscreteHamiltonian& H, const SimConfig& cfg);

struct TerminationReport {
  enum class Kind { completed, blowup_detected, diverged };
  Kind kind = Kind::completed;
  double t = 0.0;
  std::string trigger;  // sup_norm, h1A, resolution, non_finite
  long steps = 0;
};

std::string to_string(TerminationReport::Kind k);

struct RunResult {
  TimeSeries series;
  TerminationReport termination;
  double amplitude = 0.0;
  double initial_energy = 0.0;
  double initial_Q = 0.0;
  double initial_Qdot = 0.0;
  double initial_sup = 0.0;
  double initial_h1A = 0.0;
  double max_mass_drift = 0.0;    // relative
  double max_energy_drift = 0.0;  // relative, while sup < 10 x initial
  std::optional<double> first_boundary_warning;
  double stability_number = 0.0;
};

SimState initial_state(const SimConfig& cfg, const Grid& grid);
RunResult run(const SimConfig& cfg);

/// Smallest Gaussian amplitude in [a_lo, a_hi] (bisection) whose energy is
/// below -margin_fraction times its quadratic part. Throws ConfigError when
/// the bracket holds no such amplitude.
double tune_amplitude_for_negative_energy(const SimConfig& cfg);

}  // namespace magvirial
