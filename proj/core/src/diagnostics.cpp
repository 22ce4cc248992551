#include "magvirial/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace magvirial {

std::string to_string(Equation e) { return e == Equation::schrodinger ? "schrodinger" : "wave"; }

Equation equation_from_string(const std::string& s) {
  if (s == "schrodinger") return Equation::schrodinger;
  if (s == "wave") return Equation::wave;
  throw std::invalid_argument("unknown equation '" + s + "'");
}

VirialWeights VirialWeights::from(const DiscreteHamiltonian& H) {
  return {sample_weighted_trapping(H.spec(), H.grid()), sample_weighted_radial_dV(H.spec(), H.grid())};
}

namespace {

// Pointwise integrals that share one covariant gradient.
struct Integrals {
  double mass = 0.0;
  double kinetic = 0.0;        // int |grad_A u|^2
  double potential = 0.0;      // int V |u|^2
  double nonlinear = 0.0;      // int |u|^(p+1)
  double radial = 0.0;         // int |x| V_r |u|^2
  double magnetic = 0.0;       // Im int |x| u B_tau . conj(grad_A u)
  double variance = 0.0;       // int |x|^2 |u|^2
  double qdot_core = 0.0;      // Im int conj(u) grad_A u . x
  double weighted_kinetic = 0.0;  // int |x|^2 |grad_A u|^2
  double weighted_potential = 0.0;  // int |x|^2 V |u|^2
  double sup = 0.0;
  double outer_mass = 0.0;
};

Integrals integrate(const ComplexField& u, const DiscreteHamiltonian& H, const VirialWeights& w, double p,
                    double strength) {
  const Grid& g = u.grid();
  const ComplexVectorField grad = covariant_gradient(u, H);
  const int n = g.dim();
  const double shell2 = 0.81 * g.extent() * g.extent();
  const double half = 0.5 * (p + 1.0);
  Integrals s;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, x);
    const cplx ui = u[i];
    const double a2 = std::norm(ui);
    const double r2 = g.radius_squared(i);
    double kin = 0.0;
    cplx mag = 0.0;
    cplx xdot = 0.0;
    for (int a = 0; a < n; ++a) {
      const cplx ga = grad[static_cast<std::size_t>(a)][i];
      kin += std::norm(ga);
      mag += w.weighted_trapping[static_cast<std::size_t>(a)][i] * std::conj(ga);
      xdot += ga * x[static_cast<std::size_t>(a)];
    }
    s.mass += a2;
    s.kinetic += kin;
    s.potential += H.V()[i] * a2;
    s.nonlinear += std::pow(a2, half);
    s.radial += w.weighted_radial_dV[i] * a2;
    s.magnetic += (ui * mag).imag();
    s.variance += r2 * a2;
    s.qdot_core += (std::conj(ui) * xdot).imag();
    s.weighted_kinetic += r2 * kin;
    s.weighted_potential += r2 * H.V()[i] * a2;
    if (r2 > shell2) s.outer_mass += a2;
    s.sup = std::max(s.sup, std::sqrt(a2));
  }
  s.nonlinear *= strength;
  const double dv = g.cell_volume();
  for (double* f : {&s.mass, &s.kinetic, &s.potential, &s.nonlinear, &s.radial, &s.magnetic, &s.variance,
                    &s.qdot_core, &s.weighted_kinetic, &s.weighted_potential, &s.outer_mass}) {
    *f *= dv;
  }
  return s;
}

NlsVirialTerms nls_terms(const Integrals& s, int n, double p) {
  NlsVirialTerms t;
  t.kinetic = 8.0 * s.kinetic;
  t.radial_potential = -4.0 * s.radial;
  t.magnetic = 8.0 * s.magnetic;
  t.nonlinear = -4.0 * n * (p - 1.0) / (p + 1.0) * s.nonlinear;
  return t;
}

double nls_energy_form(const Integrals& s, int n, double p) {
  const double energy = 0.5 * s.kinetic + 0.5 * s.potential - s.nonlinear / (p + 1.0);
  return 16.0 * energy - 8.0 * s.potential - 4.0 * s.radial + 8.0 * s.magnetic +
         (16.0 - 4.0 * n * (p - 1.0)) / (p + 1.0) * s.nonlinear;
}

WaveVirialTerms wave_terms(const Integrals& s, double velocity_mass, int n, double p) {
  WaveVirialTerms t;
  t.kinetic = 2.0 * (velocity_mass + s.kinetic);
  t.radial_potential = -2.0 * s.radial;
  t.potential = -2.0 * s.potential;
  t.magnetic = 4.0 * s.magnetic;
  t.nonlinear = 2.0 * (1.0 - n * (p - 1.0) / (p + 1.0)) * s.nonlinear;
  return t;
}

double weighted_mass(const ComplexField& v) {
  const Grid& g = v.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.radius_squared(i) * std::norm(v[i]);
  return s * g.cell_volume();
}

}  // namespace

double variance_Q(const ComplexField& u) { return weighted_mass(u); }

double wave_Q(const ComplexField& u, const ComplexField& v, const DiscreteHamiltonian& H) {
  const VirialWeights w{VectorField(static_cast<std::size_t>(u.grid().dim()), RealField(u.grid())),
                        RealField(u.grid())};
  const Integrals s = integrate(u, H, w, 3.0, 0.0);
  const int n = u.grid().dim();
  return weighted_mass(v) + s.weighted_kinetic + s.weighted_potential - (n - 1) * s.mass;
}

double q_dot_nls(const ComplexField& u, const DiscreteHamiltonian& H) {
  const VirialWeights w{VectorField(static_cast<std::size_t>(u.grid().dim()), RealField(u.grid())),
                        RealField(u.grid())};
  return 4.0 * integrate(u, H, w, 3.0, 0.0).qdot_core;
}

NlsVirialTerms q_ddot_terms_nls(const ComplexField& u, const DiscreteHamiltonian& H, const VirialWeights& w,
                                double p, double strength) {
  return nls_terms(integrate(u, H, w, p, strength), u.grid().dim(), p);
}

double q_ddot_rhs_nls(const ComplexField& u, const DiscreteHamiltonian& H, double p, double strength) {
  return q_ddot_terms_nls(u, H, VirialWeights::from(H), p, strength).sum();
}

double q_ddot_energy_form_nls(const ComplexField& u, const DiscreteHamiltonian& H, const VirialWeights& w,
                              double p, double strength) {
  return nls_energy_form(integrate(u, H, w, p, strength), u.grid().dim(), p);
}

WaveVirialTerms q_ddot_terms_wave(const ComplexField& u, const ComplexField& v, const DiscreteHamiltonian& H,
                                  const VirialWeights& w, double p, double strength) {
  return wave_terms(integrate(u, H, w, p, strength), mass(v), u.grid().dim(), p);
}

double q_ddot_rhs_wave(const ComplexField& u, const ComplexField& v, const DiscreteHamiltonian& H, double p,
                       double strength) {
  return q_ddot_terms_wave(u, v, H, VirialWeights::from(H), p, strength).sum();
}

double boundary_mass_fraction(const ComplexField& u) {
  const Grid& g = u.grid();
  const double shell2 = 0.81 * g.extent() * g.extent();
  double total = 0.0;
  double outer = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double a2 = std::norm(u[i]);
    total += a2;
    if (g.radius_squared(i) > shell2) outer += a2;
  }
  return total > 0.0 ? outer / total : 0.0;
}

double levine_alpha(double p) { return (p - 1.0) / 4.0; }

double levine_H(const ComplexField& u, const ComplexField& v, const DiscreteHamiltonian& H, double p,
                double strength) {
  const double alpha = levine_alpha(p);
  return -covariant_kinetic(u, H) - potential_energy(u, H) + strength * nonlinear_integral(u, p) -
         (2.0 * alpha + 1.0) * mass(v);
}

DiagnosticsRecord make_record(double t, const ComplexField& u, const ComplexField* v, const DiscreteHamiltonian& H,
                              const VirialWeights& w, double p, Equation eq, double boundary_warn,
                              double strength) {
  const int n = u.grid().dim();
  const Integrals s = integrate(u, H, w, p, strength);
  DiagnosticsRecord r;
  r.t = t;
  r.mass = s.mass;
  r.sup_norm = s.sup;
  r.h1A = std::sqrt(s.mass + s.kinetic);
  r.boundary_mass_frac = s.mass > 0.0 ? s.outer_mass / s.mass : 0.0;
  const double es = 0.5 * s.kinetic + 0.5 * s.potential - s.nonlinear / (p + 1.0);
  if (eq == Equation::schrodinger) {
    r.energy = es;
    r.Q = s.variance;
    r.Qdot = 4.0 * s.qdot_core;
    r.nls_terms = nls_terms(s, n, p);
    r.Qddot_rhs = r.nls_terms.sum();
    r.qddot_energy_form = nls_energy_form(s, n, p);
  } else {
    if (v == nullptr) throw std::invalid_argument("wave diagnostics need u_t");
    const double vm = mass(*v);
    r.energy = 0.5 * vm + es;
    r.Q = weighted_mass(*v) + s.weighted_kinetic + s.weighted_potential - (n - 1) * s.mass;
    r.wave_terms = wave_terms(s, vm, n, p);
    r.Qddot_rhs = r.wave_terms.sum();
    const double alpha = levine_alpha(p);
    const double re_vu = inner(*v, u).real();
    r.F = s.mass;
    r.Fdot = 2.0 * re_vu;
    r.Hfun = -s.kinetic - s.potential + s.nonlinear - (2.0 * alpha + 1.0) * vm;
    r.levine_wedge = 4.0 * (alpha + 1.0) * (vm * s.mass - re_vu * re_vu) + 2.0 * s.mass * *r.Hfun;
  }
  if (r.boundary_mass_frac > boundary_warn) r.flags |= kFlagBoundaryMass;
  if (!std::isfinite(r.mass) || !std::isfinite(r.energy)) r.flags |= kFlagDiverged;
  return r;
}

std::vector<std::optional<double>> virial_residual(const TimeSeries& series) {
  const auto& recs = series.records;
  std::vector<std::optional<double>> out(recs.size());
  if (recs.size() < 3) return out;
  for (std::size_t k = 1; k + 1 < recs.size(); ++k) {
    const double dt_lo = recs[k].t - recs[k - 1].t;
    const double dt_hi = recs[k + 1].t - recs[k].t;
    if (!(dt_lo > 0.0) || std::abs(dt_hi - dt_lo) > 1e-9 * dt_lo) continue;
    const double second = (recs[k + 1].Q - 2.0 * recs[k].Q + recs[k - 1].Q) / (dt_lo * dt_lo);
    const double rhs = recs[k].Qddot_rhs;
    out[k] = std::abs(second - rhs) / std::max(1.0, std::abs(rhs));
  }
  return out;
}

void fill_virial_residual(TimeSeries& series) {
  const auto res = virial_residual(series);
  for (std::size_t k = 0; k < res.size(); ++k) series.records[k].virial_residual = res[k];
}

std::optional<double> parabola_positive_root(double c, double b, double a) {
  if (c == 0.0) {
    if (b == 0.0) return std::nullopt;
    const double t = -a / b;
    return t > 0.0 ? std::optional<double>(t) : std::nullopt;
  }
  const double disc = b * b - 4.0 * c * a;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double t1 = (-b - sq) / (2.0 * c);
  const double t2 = (-b + sq) / (2.0 * c);
  std::optional<double> best;
  for (double t : {t1, t2}) {
    if (t > 0.0 && (!best || t < *best)) best = t;
  }
  return best;
}

QuadraticBoundReport quadratic_bound_check(const TimeSeries& series, double E0, double Qdot0, double Q0,
                                           bool applicable, double slack, double coefficient) {
  QuadraticBoundReport rep;
  rep.coefficient = coefficient;
  rep.applicable = applicable && E0 < 0.0;
  if (!applicable) {
    rep.reason = "hypotheses of the trapping-free branch do not hold";
  } else if (!(E0 < 0.0)) {
    rep.reason = "initial energy is not negative";
  }
  rep.parabola_root = parabola_positive_root(coefficient * E0, Qdot0, Q0);
  rep.min_margin = std::numeric_limits<double>::infinity();
  const double t0 = series.records.empty() ? 0.0 : series.records.front().t;
  for (const auto& r : series.records) {
    const double t = r.t - t0;
    const double bound = coefficient * E0 * t * t + Qdot0 * t + Q0;
    const double margin = bound - r.Q;
    rep.margins.push_back(margin);
    rep.min_margin = std::min(rep.min_margin, margin);
    if (rep.applicable && margin < -slack && !rep.first_violation_t) {
      rep.first_violation_t = r.t;
      rep.holds = false;
    }
    if (t > 0.0 && E0 != 0.0) {
      const double c = (r.Q - Qdot0 * t - Q0) / (E0 * t * t);
      if (!rep.fitted_coefficient || (E0 < 0.0 ? c < *rep.fitted_coefficient : c > *rep.fitted_coefficient)) {
        rep.fitted_coefficient = c;
      }
    }
  }
  if (series.records.empty()) rep.min_margin = 0.0;
  return rep;
}

LevineReport levine_diagnostics(const TimeSeries& series, double p, double concavity_tol) {
  LevineReport rep;
  rep.alpha = levine_alpha(p);
  const auto& recs = series.records;
  for (const auto& r : recs) {
    const double F = r.F.value_or(r.mass);
    rep.F_pow.push_back(std::pow(F, -rep.alpha));
    rep.Hfun.push_back(r.Hfun.value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  if (!recs.empty() && recs.front().F && recs.front().Fdot && *recs.front().Fdot > 0.0) {
    rep.T_bound = *recs.front().F / (rep.alpha * *recs.front().Fdot);
  }
  rep.max_second_diff = -std::numeric_limits<double>::infinity();
  const double limit = rep.F_pow.empty() ? 0.0 : concavity_tol * std::abs(rep.F_pow.front());
  for (std::size_t k = 1; k + 1 < rep.F_pow.size(); ++k) {
    const double d = rep.F_pow[k + 1] - 2.0 * rep.F_pow[k] + rep.F_pow[k - 1];
    rep.second_diffs.push_back(d);
    rep.max_second_diff = std::max(rep.max_second_diff, d);
    if (d > limit) rep.concavity_ok = false;
  }
  if (rep.second_diffs.empty()) rep.max_second_diff = 0.0;
  return rep;
}

}  // namespace magvirial
