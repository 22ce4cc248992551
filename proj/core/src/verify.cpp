#include "magvirial/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "magvirial/dynamics.hpp"
#include "magvirial/io.hpp"
#include "magvirial/oracle.hpp"

namespace magvirial::verify {

namespace {

constexpr double kPi = std::numbers::pi;

class Recorder {
 public:
  Recorder(SuiteResult& r, double scale) : r_(r), scale_(scale) {}

  void le(const std::string& name, double value, double tol) {
    const bool pass = std::isfinite(value) && value <= tol * scale_;
    r_.checks.push_back({name, value, "<=", tol, pass});
  }
  void flag(const std::string& name, bool ok) { r_.checks.push_back({name, ok ? 1.0 : 0.0, "bool", 1.0, ok}); }
  void row(const std::string& line) { r_.table.push_back(line); }

 private:
  SuiteResult& r_;
  double scale_;
};

std::string sci(double v, int digits = 3) {
  std::ostringstream os;
  os << std::setprecision(digits) << std::scientific << v;
  return os.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), std::numeric_limits<double>::min()); }

PotentialSpec with_electric(PotentialSpec s, double coupling) {
  if (coupling != 0.0) {
    s.electric = ElectricFamily::inverse_quadratic;
    s.coupling = coupling;
  }
  return s;
}

PotentialSpec zero_spec(int n) {
  PotentialSpec s;
  s.dim = n;
  return s;
}

SimConfig base_config(int n, double extent, int points, double dt, double t_end) {
  SimConfig c;
  c.dim = n;
  c.extent = extent;
  c.points = points;
  c.dt = dt;
  c.t_end = t_end;
  c.potential = zero_spec(n);
  c.cadence = 10;
  return c;
}

double max_residual(const TimeSeries& s, double t_max) {
  double m = 0.0;
  for (const auto& r : s.records) {
    if (r.t <= t_max && r.virial_residual) m = std::max(m, *r.virial_residual);
  }
  return m;
}

double window_end(const RunResult& r, double t_end) {
  return r.termination.kind == TerminationReport::Kind::completed ? t_end : 0.9 * r.termination.t;
}

// ---------------------------------------------------------------- C1

void calculus(Recorder& rec, const Options& opts) {
  const Grid g(2, 10.0, 128);
  const ComplexField u = sample<cplx>(g, [](std::span<const double> x) { return std::exp(-x[0] * x[0]); });
  const ComplexVectorField grad = spectral_gradient(u);

  // The stencil's own error at h = 0.156 is near 1e-3, so the reference line is
  // sampled 16 times finer and read back at the coarse points.
  const int refine = 16;
  const int fine_n = g.points() * refine;
  const double fine_h = 2.0 * g.extent() / fine_n;
  std::vector<cplx> line(static_cast<std::size_t>(fine_n));
  for (int j = 0; j < fine_n; ++j) {
    const double x = -g.extent() + j * fine_h;
    line[static_cast<std::size_t>(j)] = std::exp(-x * x);
  }
  const std::vector<cplx> fine = oracle::fd_derivative_line(line, fine_h);
  double err_fd = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx ref = fine[static_cast<std::size_t>(g.axis_index(i, 0) * refine)];
    err_fd = std::max({err_fd, std::abs(grad[0][i] - ref), std::abs(grad[1][i])});
  }
  rec.le("gradient_vs_fd", err_fd, 1e-6);

  const ComplexVectorField coarse_fd = oracle::fd_gradient(u);
  double err_coarse = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err_coarse = std::max(err_coarse, std::abs(grad[0][i] - coarse_fd[0][i]));
  rec.row("fd stencil on the N=128 lattice itself: sup error " + sci(err_coarse) + " (stencil truncation)");

  const ComplexVectorField dft = oracle::dft_gradient(u);
  double err_dft = 0.0;
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t i = 0; i < g.size(); ++i) err_dft = std::max(err_dft, std::abs(grad[a][i] - dft[a][i]));
  }
  rec.le("gradient_vs_direct_dft", err_dft, 1e-11);

  const ComplexField w = random_smooth_field(g, opts.seed);
  rec.le("parseval", rel(spectral_mass(forward_transform(w)), mass(w)), 1e-12);

  for (int n : {2, 3}) {
    const Grid gn(n, 10.0, n == 2 ? 128 : 64);
    const RealField f = sample<double>(gn, [](std::span<const double> x) {
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      return std::exp(-r2);
    });
    rec.le("gaussian_quadrature_n" + std::to_string(n), std::abs(quadrature(f) - std::pow(kPi, 0.5 * n)), 1e-10);
  }
}

// ---------------------------------------------------------------- C2

void potentials(Recorder& rec, const Options& opts) {
  std::mt19937_64 rng(opts.seed);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  for (int n : {2, 3, 4}) {
    PotentialSpec s = zero_spec(n);
    s.magnetic = MagneticFamily::linear_M;
    s.matrix = build_M(n);
    const AntisymMatrix& M = *s.matrix;
    double err_b = 0.0, err_orth = 0.0, err_id = 0.0, err_div = 0.0;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int k = 0; k < 10000; ++k) {
      for (auto& c : x) c = uniform(-5.0, 5.0);
      const AntisymMatrix B = eval_B(s, x);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) err_b = std::max(err_b, std::abs(B(i, j) - M(i, j)));
      }
      const std::vector<double> bt = trapping_component(s, x);
      const std::vector<double> A = eval_A(s, x);
      double dot = 0.0, r2 = 0.0;
      for (int i = 0; i < n; ++i) {
        dot += bt[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        r2 += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      }
      const double r = std::sqrt(r2);
      err_orth = std::max(err_orth, std::abs(dot));
      for (int i = 0; i < n; ++i) {
        err_id = std::max(err_id, std::abs(r * bt[static_cast<std::size_t>(i)] + 2.0 * A[static_cast<std::size_t>(i)]));
      }
      err_div = std::max(err_div, std::abs(divergence_A(s, x)));
    }
    const std::string tag = "_n" + std::to_string(n);
    rec.le("B_equals_M" + tag, err_b, 1e-12);
    rec.le("Btau_dot_x" + tag, err_orth, 1e-12);
    rec.le("x_Btau_plus_2A" + tag, err_id, 1e-12);
    rec.le("div_A" + tag, err_div, 1e-12);
  }
  const Grid g(3, 10.0, 64);
  for (MagneticFamily f : {MagneticFamily::singular_r2, MagneticFamily::singular_cyl}) {
    PotentialSpec s = zero_spec(3);
    s.magnetic = f;
    s.epsilon = 2.0 * g.spacing();
    double sup = 0.0;
    std::vector<double> x(3);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.point(i, x);
      for (double c : trapping_component(s, x)) sup = std::max(sup, std::abs(c));
    }
    rec.le("Btau_sup_" + to_string(f), sup, 1e-8);
  }
}

// ---------------------------------------------------------------- C3

void conservation(Recorder& rec, const Options&) {
  SimConfig nls = base_config(2, 10.0, 128, 1e-3, 1.0);
  nls.potential = with_electric(linear_magnetic_spec(2, 10.0), 1.0);
  nls.initial.gaussian.amplitude = 1.0;
  const RunResult a = run(nls);
  rec.flag("nls_completed", a.termination.kind == TerminationReport::Kind::completed);
  rec.le("nls_mass_drift", a.max_mass_drift, 1e-8);
  rec.le("nls_energy_drift", a.max_energy_drift, 1e-6);

  SimConfig wave = base_config(3, 10.0, 64, 5e-3, 1.0);
  wave.equation = Equation::wave;
  wave.potential = with_electric(linear_magnetic_spec(3, 10.0), 1.0);
  wave.initial.gaussian.amplitude = 1.0;
  const RunResult b = run(wave);
  rec.flag("wave_completed", b.termination.kind == TerminationReport::Kind::completed);
  rec.le("wave_energy_drift", b.max_energy_drift, 1e-6);
  rec.row("nls: E0 " + sci(a.initial_energy, 6) + ", wave: E0 " + sci(b.initial_energy, 6) + " (dt 5e-3)");
}

// ---------------------------------------------------------------- C4

void free_gaussian(Recorder& rec, const Options&) {
  SimConfig c = base_config(2, 12.0, 128, 1e-3, 0.5);
  c.strength = 0.0;
  c.initial.gaussian.amplitude = 1.0;
  const RunResult r = run(c);
  const auto& recs = r.series.records;
  double q_err = 0.0, qdd_err = 0.0, boundary = 0.0;
  const double qdd = oracle::gaussian_free_Qddot(2);
  for (std::size_t k = 0; k < recs.size(); ++k) {
    q_err = std::max(q_err, rel(recs[k].Q, oracle::gaussian_free_Q(2, recs[k].t)));
    boundary = std::max(boundary, recs[k].boundary_mass_frac);
    if (k > 0 && k + 1 < recs.size()) {
      const double h = recs[k].t - recs[k - 1].t;
      qdd_err = std::max(qdd_err, rel((recs[k + 1].Q - 2.0 * recs[k].Q + recs[k - 1].Q) / (h * h), qdd));
    }
  }
  rec.flag("completed", r.termination.kind == TerminationReport::Kind::completed && !recs.empty() &&
                            std::abs(recs.back().t - 0.5) < 1e-12);
  rec.le("Q_vs_closed_form", q_err, 5e-3);
  rec.le("Qddot_vs_8pi", qdd_err, 1e-2);
  rec.le("boundary_mass", boundary, 1e-8);
}

// ---------------------------------------------------------------- C5

void virial_nls(Recorder& rec, const Options&) {
  SimConfig fine = base_config(2, 10.0, 256, 5e-4, 3.0);
  fine.potential = with_electric(linear_magnetic_spec(2, 10.0), 0.5);
  fine.initial.gaussian.tune_amplitude = true;
  const double amplitude = tune_amplitude_for_negative_energy(fine);
  fine.initial.gaussian.tune_amplitude = false;
  fine.initial.gaussian.amplitude = amplitude;
  SimConfig coarse = fine;
  coarse.points = 128;
  coarse.dt = 1e-3;

  const RunResult rf = run(fine);
  const RunResult rc = run(coarse);
  const double t_fine = window_end(rf, fine.t_end);
  const double t_common = std::min(t_fine, window_end(rc, coarse.t_end));
  const double res_fine = max_residual(rf.series, t_fine);
  const double res_fine_common = max_residual(rf.series, t_common);
  const double res_coarse_common = max_residual(rc.series, t_common);

  rec.flag("negative_energy", rf.initial_energy < 0.0);
  rec.le("residual_N256", res_fine, 1e-3);
  rec.le("residual_ratio_N256_over_N128", res_fine_common / res_coarse_common, 0.5);
  double identity = 0.0;
  for (const RunResult* r : {&rf, &rc}) {
    for (const auto& q : r->series.records) {
      identity = std::max(identity, std::abs(q.Qddot_rhs - q.qddot_energy_form) / std::max(1.0, std::abs(q.Qddot_rhs)));
    }
  }
  rec.le("energy_form_identity", identity, 1e-9);

  rec.row("amplitude " + sci(amplitude, 6) + ", E_S(0) " + sci(rf.initial_energy, 6) + ", t_detect N128 " +
          sci(rc.termination.t, 4) + ", N256 " + sci(rf.termination.t, 4));
  rec.row("window: N256 t <= " + sci(t_fine, 4) + ", comparison t <= " + sci(t_common, 4));
  rec.row("t,residual_N128_dt1e-3,residual_N256_dt5e-4");
  auto at = [](const TimeSeries& s, double t) -> std::string {
    for (const auto& q : s.records) {
      if (std::abs(q.t - t) < 1e-9 && q.virial_residual) return sci(*q.virial_residual);
    }
    return "";
  };
  for (double t = 0.1; t <= t_common + 1e-12; t += 0.1) {
    rec.row(sci(t, 2) + "," + at(rc.series, t) + "," + at(rf.series, t));
  }
}

// ---------------------------------------------------------------- C6

void blowup_nls(Recorder& rec, const Options&) {
  struct Case {
    std::string tag;
    PotentialSpec spec;
  };
  const std::vector<Case> cases = {{"a", zero_spec(2)}, {"b", with_electric(linear_magnetic_spec(2, 10.0), 0.5)}};
  for (const Case& k : cases) {
    SimConfig c = base_config(2, 10.0, 128, 1e-3, 3.0);
    c.potential = k.spec;
    c.initial.gaussian.tune_amplitude = true;
    const RunResult r = run(c);
    const bool fired = r.termination.kind == TerminationReport::Kind::blowup_detected;
    double q_min = std::numeric_limits<double>::infinity();
    for (const auto& q : r.series.records) q_min = std::min(q_min, q.Q);
    rec.flag("E0_negative_" + k.tag, r.initial_energy < 0.0);
    rec.flag("detector_fired_" + k.tag, fired);
    rec.flag("Q_nonnegative_" + k.tag, q_min >= 0.0);
    const auto root16 = parabola_positive_root(16.0 * r.initial_energy, r.initial_Qdot, r.initial_Q);
    const auto bound8 = quadratic_bound_check(r.series, r.initial_energy, r.initial_Qdot, r.initial_Q,
                                              k.spec.trapping_free(), 1e-6 * r.initial_Q, 8.0);
    if (k.spec.trapping_free()) {
      rec.le("t_detect_over_root16_" + k.tag, fired && root16 ? r.termination.t / *root16 : INFINITY, 1.1);
    }
    rec.row(k.tag + ": amplitude " + sci(r.amplitude, 6) + ", E_S(0) " + sci(r.initial_energy, 5) + ", t_detect " +
            sci(r.termination.t, 4) + " (" + r.termination.trigger + "), root16 " +
            (root16 ? sci(*root16, 4) : "none") + ", root8 " +
            (bound8.parabola_root ? sci(*bound8.parabola_root, 4) : "none") + ", fitted C " +
            (bound8.fitted_coefficient ? sci(*bound8.fitted_coefficient, 4) : "none") + ", C=8 bound min margin " +
            sci(bound8.min_margin, 3));
  }
}

// ---------------------------------------------------------------- C7

void blowup_wave(Recorder& rec, const Options&) {
  SimConfig c = base_config(3, 10.0, 64, 1e-2, 8.0);
  c.equation = Equation::wave;
  c.potential = with_electric(linear_magnetic_spec(3, 10.0), 0.3);
  c.initial.velocity_ratio = 0.2;
  c.initial.gaussian.tune_amplitude = true;
  const RunResult r = run(c);
  const LevineReport lev = levine_diagnostics(r.series, c.p);
  const double E0 = r.initial_energy;
  const double scale = std::max(1.0, std::abs((c.p + 1.0) * E0));
  double h_gap = 0.0;
  double wedge_gap = 0.0;
  double wedge_scale = 1.0;
  for (const auto& q : r.series.records) {
    h_gap = std::max(h_gap, -(q.Hfun.value_or(NAN) + (c.p + 1.0) * E0));
    if (q.levine_wedge) wedge_gap = std::max(wedge_gap, -*q.levine_wedge);
    wedge_scale = std::max(wedge_scale, q.mass * q.mass);
  }
  const double f0 = lev.F_pow.empty() ? 1.0 : std::abs(lev.F_pow.front());
  const bool fired = r.termination.kind == TerminationReport::Kind::blowup_detected;
  rec.flag("alpha_is_half", lev.alpha == 0.5);
  rec.flag("E0_negative", E0 < 0.0);
  rec.le("Hfun_lower_bound_gap", h_gap / scale, 1e-6);
  rec.le("F_pow_second_difference", std::max(0.0, lev.max_second_diff) / f0, 1e-6);
  rec.le("levine_wedge_gap", wedge_gap / wedge_scale, 1e-6);
  rec.flag("detector_fired", fired);
  rec.le("t_detect_over_T_bound", fired && lev.T_bound ? r.termination.t / *lev.T_bound : INFINITY, 1.1);
  rec.row("amplitude " + sci(r.amplitude, 6) + ", E_W(0) " + sci(E0, 5) + ", t_detect " + sci(r.termination.t, 4) +
          " (" + r.termination.trigger + "), T_bound " + (lev.T_bound ? sci(*lev.T_bound, 4) : "none") +
          ", energy drift " + sci(r.max_energy_drift));
}

// ---------------------------------------------------------------- C8

void gauge(Recorder& rec, const Options& opts) {
  const Grid g(2, 10.0, 64);
  const ComplexField u = random_smooth_field(g, opts.seed);
  const RealField psi = random_periodic_field(g, opts.seed + 1, 0.5);
  const PotentialSpec spec = with_electric(linear_magnetic_spec(2, 10.0), 1.0);
  const VectorField A = sample_A(spec, g);
  const RealField V = sample_V(spec, g);
  const oracle::GaugePair t = oracle::gauge_transform(u, A, psi);
  const DiscreteHamiltonian h0(g, A, V);
  const DiscreteHamiltonian h1(g, t.A, V);
  rec.le("mass", rel(mass(t.u), mass(u)), 1e-9);
  rec.le("energy", rel(energy_schrodinger(t.u, h1, 3.0), energy_schrodinger(u, h0, 3.0)), 1e-9);
  rec.le("covariant_gradient_norm", rel(std::sqrt(covariant_kinetic(t.u, h1)), std::sqrt(covariant_kinetic(u, h0))),
         1e-9);
}

// ---------------------------------------------------------------- C9

void hypotheses(Recorder& rec, const Options&) {
  rec.flag("threshold_n4_is_2", strichartz_high_dim_threshold(4) == 2.0);
  rec.flag("threshold_n5_is_16/3", strichartz_high_dim_threshold(5) == 16.0 / 3.0);
  rec.flag("threshold_n6_is_10", strichartz_high_dim_threshold(6) == 10.0);

  const Grid g(3, 10.0, 128);
  const double rho = 1.5;
  const RealField bump = sample<double>(g, [&](std::span<const double> x) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= rho * rho ? 1.0 : 0.0;
  });
  const double k = kato_norm(bump, 2.5);
  const double expected = oracle::kato_ball_value(3, rho);
  rec.le("kato_bump_vs_radial_quadrature", rel(k, expected), 0.1);
  std::size_t center = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.radius_squared(i) == 0.0) center = i;
  }
  rec.le("kato_fft_vs_direct_sum", rel(k, oracle::kato_sum_at(bump, center, 2.5)), 1e-9);
  rec.row("kato norm " + sci(k, 6) + ", 2 pi rho^2 = " + sci(expected, 6));

  const Grid g3(3, 10.0, 64);
  std::vector<std::pair<std::string, PotentialSpec>> specs;
  specs.emplace_back("zero", zero_spec(3));
  for (MagneticFamily f : {MagneticFamily::singular_r2, MagneticFamily::singular_cyl}) {
    PotentialSpec s = zero_spec(3);
    s.magnetic = f;
    s.epsilon = 2.0 * g3.spacing();
    specs.emplace_back(to_string(f), s);
  }
  specs.emplace_back("inverse_quadratic", with_electric(zero_spec(3), 1.0));
  for (const auto& [name, s] : specs) {
    rec.flag("smallness_pass_" + name, hypothesis_report(s, g3).all_smallness_pass());
  }
}

// ---------------------------------------------------------------- C10

void determinism(Recorder& rec, const Options& opts) {
  const std::filesystem::path dir = opts.work_dir / "determinism";
  std::filesystem::create_directories(dir);
  const std::filesystem::path cfg = dir / "config.json";
  {
    std::ofstream f(cfg);
    f << R"({
  "equation": "schrodinger", "dim": 2, "p": 3,
  "grid": {"extent": 8, "points": 64},
  "time": {"dt": 0.001, "t_end": 0.2, "cadence": 5},
  "potential": {"magnetic": {"family": "linear_M"},
                "electric": {"family": "inverse_quadratic", "coupling": 1}},
  "initial": {"kind": "random", "random_amplitude": 1.2}
})";
  }
  std::ostringstream sink;
  io::CommandOptions o;
  o.seed = opts.seed;
  std::string bytes[2];
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    o.out_dir = dir / ("out" + std::to_string(k));
    codes[k] = io::cmd_run(cfg, o, sink, sink);
    std::ifstream in(*o.out_dir / "series.csv", std::ios::binary);
    bytes[k].assign(std::istreambuf_iterator<char>(in), {});
  }
  rec.flag("runs_succeeded", codes[0] == 0 && codes[1] == 0);
  rec.flag("series_nonempty", bytes[0].size() > std::string(io::kSeriesHeader).size() + 1);
  rec.flag("series_byte_identical", !bytes[0].empty() && bytes[0] == bytes[1]);
}

struct Suite {
  const char* id;
  const char* name;
  void (*fn)(Recorder&, const Options&);
};

constexpr Suite kSuites[] = {
    {"C1", "calculus", calculus},       {"C2", "potentials", potentials},   {"C3", "conservation", conservation},
    {"C4", "free-gaussian", free_gaussian}, {"C5", "virial-nls", virial_nls}, {"C6", "blowup-nls", blowup_nls},
    {"C7", "blowup-wave", blowup_wave}, {"C8", "gauge", gauge},             {"C9", "hypotheses", hypotheses},
    {"C10", "determinism", determinism},
};

const Suite& find(const std::string& name) {
  for (const Suite& s : kSuites) {
    if (name == s.name || name == s.id) return s;
  }
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace

bool SuiteResult::pass() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

double tolerance_scale_from_env() {
  const char* v = std::getenv("MAGVIRIAL_TOL_SCALE");
  if (v == nullptr || *v == '\0') return 1.0;
  char* end = nullptr;
  const double s = std::strtod(v, &end);
  return end != v && std::isfinite(s) && s > 0.0 ? s : 1.0;
}

Options default_options() {
  Options o;
  o.tol_scale = tolerance_scale_from_env();
  o.work_dir = std::filesystem::temp_directory_path() / "magvirial-verify";
  return o;
}

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const Suite& s : kSuites) out.emplace_back(s.name);
  return out;
}

std::string suite_id(const std::string& name) { return find(name).id; }

SuiteResult run_suite(const std::string& name, const Options& opts) {
  const Suite& s = find(name);
  SuiteResult r;
  r.id = s.id;
  r.name = s.name;
  Recorder rec(r, opts.tol_scale);
  const auto start = std::chrono::steady_clock::now();
  try {
    s.fn(rec, opts);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string summary_line(const SuiteResult& r) {
  std::ostringstream os;
  os << (r.pass() ? "PASS" : "FAIL") << "  " << std::left << std::setw(4) << r.id << std::setw(14) << r.name;
  std::size_t passed = 0;
  const Check* worst = nullptr;
  double worst_ratio = -1.0;
  for (const Check& c : r.checks) {
    if (c.pass) ++passed;
    double ratio = c.relation == "bool" ? (c.pass ? 0.0 : INFINITY) : c.value / std::max(c.tolerance, 1e-300);
    if (!c.pass) ratio = INFINITY;
    if (!std::isfinite(c.value) && c.relation != "bool") ratio = INFINITY;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst = &c;
    }
  }
  os << passed << "/" << r.checks.size() << " checks";
  if (!r.error.empty()) {
    os << "; error: " << r.error;
  } else if (worst != nullptr) {
    os << "; worst " << worst->name << " = ";
    if (worst->relation == "bool") {
      os << (worst->pass ? "true" : "false");
    } else {
      os << sci(worst->value) << " (tol " << sci(worst->tolerance, 2) << ")";
    }
  }
  os << std::fixed << std::setprecision(1) << "  [" << r.seconds << " s]";
  return os.str();
}

void write_table(std::ostream& os, const SuiteResult& r) {
  for (const Check& c : r.checks) {
    os << r.id << ',' << c.name << ',' << io::format_double(c.value) << ',' << c.relation << ','
       << io::format_double(c.tolerance) << ',' << (c.pass ? "pass" : "fail") << '\n';
  }
  if (!r.error.empty()) os << r.id << ",error,,,," << "fail" << '\n';
}

int cmd_verify(const std::string& suite, const Options& opts, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = suite_names();
  } else {
    try {
      names.push_back(find(suite).name);
    } catch (const std::invalid_argument& e) {
      err << e.what() << "; known suites:";
      for (const auto& n : suite_names()) err << ' ' << n;
      err << '\n';
      return io::kExitConfig;
    }
  }
  out << "suite,check,value,relation,tolerance,result\n";
  bool ok = true;
  std::vector<SuiteResult> results;
  for (const auto& n : names) {
    results.push_back(run_suite(n, opts));
    write_table(out, results.back());
    ok = ok && results.back().pass();
  }
  for (const auto& r : results) {
    for (const auto& row : r.table) out << "# " << r.id << ' ' << row << '\n';
  }
  for (const auto& r : results) out << "# " << summary_line(r) << '\n';
  return ok ? io::kExitOk : io::kExitFailure;
}

}  // namespace magvirial::verify
