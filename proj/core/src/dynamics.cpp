#include "magvirial/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace magvirial {

// ---------------------------------------------------------------- data

namespace {

// Uniform in [lo, hi) from the raw engine output, so the stream does not
// depend on the standard library's distribution implementations.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

}  // namespace

ComplexField random_smooth_field(const Grid& grid, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  const int n = grid.dim();
  const double R = grid.extent();
  struct Bump {
    std::vector<double> center, xi;
    double width;
    cplx coef;
  };
  std::vector<Bump> bumps(4);
  for (auto& b : bumps) {
    for (int a = 0; a < n; ++a) {
      b.center.push_back(uniform(rng, -0.25 * R, 0.25 * R));
      b.xi.push_back(uniform(rng, -1.0, 1.0));
    }
    b.width = uniform(rng, 0.8, 1.5);
    b.coef = std::polar(uniform(rng, 0.3, 1.0), uniform(rng, 0.0, 2.0 * std::numbers::pi));
  }
  return sample<cplx>(grid, [&](std::span<const double> x) {
    cplx s = 0.0;
    for (const auto& b : bumps) {
      double d2 = 0.0;
      double ph = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) {
        const double d = x[a] - b.center[a];
        d2 += d * d;
        ph += b.xi[a] * x[a];
      }
      s += b.coef * std::exp(-d2 / (2.0 * b.width * b.width)) * std::polar(1.0, ph);
    }
    return amplitude * s;
  });
}

RealField random_periodic_field(const Grid& grid, std::uint64_t seed, double amplitude, int max_mode) {
  std::mt19937_64 rng(seed);
  const int n = grid.dim();
  const double k0 = std::numbers::pi / grid.extent();
  struct Mode {
    std::vector<double> k;
    double c, phase;
  };
  std::vector<Mode> modes(6);
  for (auto& m : modes) {
    for (int a = 0; a < n; ++a) {
      m.k.push_back(k0 * std::floor(uniform(rng, -max_mode, max_mode + 1.0)));
    }
    m.c = uniform(rng, -1.0, 1.0);
    m.phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  }
  return sample<double>(grid, [&](std::span<const double> x) {
    double s = 0.0;
    for (const auto& m : modes) {
      double ph = m.phase;
      for (std::size_t a = 0; a < x.size(); ++a) ph += m.k[a] * x[a];
      s += m.c * std::cos(ph);
    }
    return amplitude * s;
  });
}

// ---------------------------------------------------------------- config

Grid SimConfig::make_grid() const { return Grid(dim, extent, points); }

bool SimConfig::mass_critical_or_supercritical() const noexcept { return p >= 1.0 + 4.0 / dim; }

void SimConfig::validate() const {
  if (dim < 2) throw ConfigError("dim must be >= 2");
  if (dim > 3) throw ConfigError("time integration supports dim 2 and 3 only");
  if (equation == Equation::wave && dim < 3) throw ConfigError("the wave equation needs dim >= 3");
  const double p_max = dim > 2 ? 1.0 + 4.0 / (dim - 2) : std::numeric_limits<double>::infinity();
  if (!(p > 1.0) || !(p < p_max)) {
    throw ConfigError("p must satisfy 1 < p < 1 + 4/(n-2)");
  }
  if (potential.dim != dim) throw ConfigError("potential dimension does not match dim");
  try {
    potential.validate();
    (void)make_grid();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be >= 0");
  if (cadence < 1) throw ConfigError("cadence must be >= 1");
  if (!(strength >= 0.0) || !std::isfinite(strength)) throw ConfigError("strength must be >= 0");
  if (!(blowup.sup_factor > 1.0) || !(blowup.h1a_factor > 1.0)) {
    throw ConfigError("blow-up factors must exceed 1");
  }
  if (!(blowup.resolution_tail >= 0.0) || blowup.resolution_tail >= 1.0) {
    throw ConfigError("resolution_tail must lie in [0, 1)");
  }
  if (!(boundary_warn >= 0.0)) throw ConfigError("boundary_warn must be >= 0");
  if (initial.kind == InitialData::Kind::gaussian) {
    const auto& g = initial.gaussian;
    if (!(g.width > 0.0)) throw ConfigError("Gaussian width must be positive");
    if (!g.center.empty() && static_cast<int>(g.center.size()) != dim) {
      throw ConfigError("Gaussian center must have dim entries");
    }
    if (!g.velocity.empty() && static_cast<int>(g.velocity.size()) != dim) {
      throw ConfigError("Gaussian velocity must have dim entries");
    }
    if (g.tune_amplitude && !(tune.a_hi > tune.a_lo && tune.a_lo > 0.0)) {
      throw ConfigError("tuning bracket must satisfy 0 < a_lo < a_hi");
    }
  }
  if (initial.kind == InitialData::Kind::samples) {
    if (!initial.samples_u) throw ConfigError("sampled initial data is missing");
    if (!(initial.samples_u->grid() == make_grid())) throw ConfigError("initial samples live on another grid");
    if (equation == Equation::wave && initial.samples_v &&
        !(initial.samples_v->grid() == make_grid())) {
      throw ConfigError("initial velocity samples live on another grid");
    }
  }
}

double stability_number(const SimConfig& cfg, const DiscreteHamiltonian& H) {
  double a_max = 0.0;
  double v_max = 0.0;
  for (std::size_t i = 0; i < H.grid().size(); ++i) {
    a_max = std::max(a_max, std::sqrt(H.A_squared()[i]));
    v_max = std::max(v_max, std::abs(H.V()[i]));
  }
  const double k = std::sqrt(H.grid().k_squared_max()) + a_max;
  const double lambda = k * k + v_max;
  return cfg.equation == Equation::schrodinger ? cfg.dt * lambda : cfg.dt * std::sqrt(lambda);
}

// ---------------------------------------------------------------- rhs

RhsEvaluator::RhsEvaluator(const DiscreteHamiltonian& H, double p, bool dealias, double strength)
    : H_(&H), p_(p), dealias_(dealias), strength_(strength), u_hat_(H.grid()), scratch_(H.grid()), local_(H.grid()) {
  const Grid& g = H.grid();
  const int npts = g.points();
  k2_.resize(g.size());
  keep_.resize(g.size());
  tail_.resize(g.size());
  axis_k_.assign(static_cast<std::size_t>(g.dim()), std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    k2_[i] = g.k_squared(i);
    keep_[i] = g.dealias_keeps(i) ? 1 : 0;
    bool tail = false;
    for (int a = 0; a < g.dim(); ++a) {
      const int idx = g.axis_index(i, a);
      const int m = idx < npts / 2 ? idx : npts - idx;
      tail = tail || 4 * m > npts;
      axis_k_[static_cast<std::size_t>(a)][i] = g.frequency(idx);
    }
    tail_[i] = tail ? 1 : 0;
  }
}

void RhsEvaluator::apply(const ComplexField& u, ComplexField& out, StepMonitor* monitor) {
  const Grid& g = H_->grid();
  const std::size_t size = g.size();
  const DiscreteHamiltonian& H = *H_;
  g.forward(u.data(), u_hat_.data());

  // Pointwise part (|A|^2 + V) u + 2i A . grad u, kept in physical space.
  double kinetic = 0.0;
  for (std::size_t i = 0; i < size; ++i) local_[i] = (H.A_squared()[i] + H.V()[i]) * u[i];
  if (H.has_magnetic()) {
    for (int a = 0; a < g.dim(); ++a) {
      const auto& ka = axis_k_[static_cast<std::size_t>(a)];
      for (std::size_t i = 0; i < size; ++i) scratch_[i] = cplx(-ka[i] * u_hat_[i].imag(), ka[i] * u_hat_[i].real());
      g.inverse(scratch_.data(), scratch_.data());
      const RealField& Aa = H.A()[static_cast<std::size_t>(a)];
      for (std::size_t i = 0; i < size; ++i) {
        const cplx d = scratch_[i];
        local_[i] += cplx(-2.0 * Aa[i] * d.imag(), 2.0 * Aa[i] * d.real());
        if (monitor != nullptr) kinetic += std::norm(d - cplx(0.0, Aa[i]) * u[i]);
      }
    }
    kinetic *= g.cell_volume();
  }

  if (monitor != nullptr) {
    double total = 0.0;
    double tail = 0.0;
    double spectral_kin = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      const double w = std::norm(u_hat_[i]);
      total += w;
      if (tail_[i]) tail += w;
      spectral_kin += k2_[i] * w;
    }
    double sup = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < size; ++i) {
      const double a = std::abs(u[i]);
      if (!std::isfinite(a)) finite = false;
      sup = std::max(sup, a);
    }
    const double scale = g.cell_volume() / static_cast<double>(size);
    if (!H.has_magnetic()) kinetic = spectral_kin * scale;
    monitor->sup = sup;
    monitor->finite = finite && std::isfinite(total);
    monitor->tail_fraction = total > 0.0 ? tail / total : 0.0;
    monitor->h1A = std::sqrt(total * scale + kinetic);
  }

  // Nonlinearity |u|^(p-1) u.
  const double e = 0.5 * (p_ - 1.0);
  const bool cubic = p_ == 3.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double a2 = std::norm(u[i]);
    scratch_[i] = strength_ * (cubic ? a2 : std::pow(a2, e)) * u[i];
  }

  if (dealias_) {
    g.forward(scratch_.data(), scratch_.data());
    for (std::size_t i = 0; i < size; ++i) {
      out[i] = k2_[i] * u_hat_[i] - (keep_[i] ? scratch_[i] : cplx(0.0));
    }
    g.inverse(out.data(), out.data());
    for (std::size_t i = 0; i < size; ++i) out[i] += local_[i];
  } else {
    for (std::size_t i = 0; i < size; ++i) out[i] = k2_[i] * u_hat_[i];
    g.inverse(out.data(), out.data());
    for (std::size_t i = 0; i < size; ++i) out[i] += local_[i] - scratch_[i];
  }
}

ComplexField nls_rhs(const SimState& state, const DiscreteHamiltonian& H, double p, bool dealias,
                     double strength) {
  RhsEvaluator eval(H, p, dealias, strength);
  ComplexField out(H.grid());
  eval.apply(state.u, out);
  for (auto& z : out.values()) z = cplx(z.imag(), -z.real());  // -i z
  return out;
}

std::pair<ComplexField, ComplexField> nlw_rhs(const SimState& state, const DiscreteHamiltonian& H, double p,
                                              bool dealias, double strength) {
  if (!state.v) throw std::invalid_argument("wave state needs u_t");
  RhsEvaluator eval(H, p, dealias, strength);
  ComplexField dv(H.grid());
  eval.apply(state.u, dv);
  for (auto& z : dv.values()) z = -z;
  return {*state.v, std::move(dv)};
}

// ---------------------------------------------------------------- RK4

Integrator::Integrator(const DiscreteHamiltonian& H, Equation eq, double p, bool dealias, double strength)
    : H_(&H),
      eq_(eq),
      eval_(H, p, dealias, strength),
      ku_(H.grid()),
      kv_(H.grid()),
      yu_(H.grid()),
      yv_(H.grid()),
      accu_(H.grid()),
      accv_(H.grid()),
      op_(H.grid()) {}

void Integrator::rhs(const ComplexField& u, const ComplexField* v, ComplexField& du, ComplexField* dv,
                     StepMonitor* mon) {
  if (eq_ == Equation::schrodinger) {
    eval_.apply(u, du, mon);
    for (auto& z : du.values()) z = cplx(z.imag(), -z.real());
    return;
  }
  eval_.apply(u, op_, mon);
  std::copy(v->values().begin(), v->values().end(), du.values().begin());
  for (std::size_t i = 0; i < op_.size(); ++i) (*dv)[i] = -op_[i];
}

StepMonitor Integrator::observe(const SimState& state) {
  StepMonitor mon;
  eval_.apply(state.u, op_, &mon);
  return mon;
}

StepMonitor Integrator::step(SimState& s, double dt) {
  const bool wave = eq_ == Equation::wave;
  const std::size_t size = s.u.size();
  StepMonitor mon;
  static constexpr double kWeights[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
  static constexpr double kNodes[3] = {0.5, 0.5, 1.0};

  std::copy(s.u.values().begin(), s.u.values().end(), accu_.values().begin());
  if (wave) std::copy(s.v->values().begin(), s.v->values().end(), accv_.values().begin());

  for (int stage = 0; stage < 4; ++stage) {
    const ComplexField& u_in = stage == 0 ? s.u : yu_;
    const ComplexField* v_in = wave ? (stage == 0 ? &*s.v : &yv_) : nullptr;
    rhs(u_in, v_in, ku_, wave ? &kv_ : nullptr, stage == 0 ? &mon : nullptr);
    const double w = kWeights[stage] * dt;
    for (std::size_t i = 0; i < size; ++i) accu_[i] += w * ku_[i];
    if (wave) {
      for (std::size_t i = 0; i < size; ++i) accv_[i] += w * kv_[i];
    }
    if (stage < 3) {
      const double c = kNodes[stage] * dt;
      for (std::size_t i = 0; i < size; ++i) yu_[i] = s.u[i] + c * ku_[i];
      if (wave) {
        for (std::size_t i = 0; i < size; ++i) yv_[i] = (*s.v)[i] + c * kv_[i];
      }
    }
  }
  std::swap(s.u, accu_);
  if (wave) std::swap(*s.v, accv_);
  s.step += 1;
  s.t += dt;
  if (!all_finite(s.u) || (wave && !all_finite(*s.v))) {
    s.diverged = true;
    s.u.set_diverged(true);
  }
  return mon;
}

SimState rk4_step(const SimState& state, const DiscreteHamiltonian& H, const SimConfig& cfg) {
  if (state.diverged) throw std::invalid_argument("cannot step a diverged state");
  Integrator integ(H, cfg.equation, cfg.p, cfg.dealias, cfg.strength);
  SimState next = state;
  integ.step(next, cfg.dt);
  return next;
}

// ---------------------------------------------------------------- runs

std::string to_string(TerminationReport::Kind k) {
  switch (k) {
    case TerminationReport::Kind::completed: return "completed";
    case TerminationReport::Kind::blowup_detected: return "blowup_detected";
    case TerminationReport::Kind::diverged: return "diverged";
  }
  return "unknown";
}

namespace {

ComplexField gaussian_profile(const SimConfig& cfg, const Grid& grid, double amplitude) {
  const GaussianData& gd = cfg.initial.gaussian;
  const auto n = static_cast<std::size_t>(cfg.dim);
  std::vector<double> center = gd.center.empty() ? std::vector<double>(n, 0.0) : gd.center;
  std::vector<double> vel = gd.velocity.empty() ? std::vector<double>(n, 0.0) : gd.velocity;
  const double inv = 1.0 / (2.0 * gd.width * gd.width);
  return sample<cplx>(grid, [&](std::span<const double> x) {
    double d2 = 0.0;
    double phase = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      const double d = x[a] - center[a];
      d2 += d * d;
      phase += vel[a] * x[a];
    }
    phase += gd.chirp * d2;
    return amplitude * std::exp(-d2 * inv) * cplx(std::cos(phase), std::sin(phase));
  });
}

SimState state_with_amplitude(const SimConfig& cfg, const Grid& grid, double amplitude) {
  SimState s{0.0, ComplexField(grid), std::nullopt, 0, false};
  switch (cfg.initial.kind) {
    case InitialData::Kind::zero: break;
    case InitialData::Kind::gaussian: s.u = gaussian_profile(cfg, grid, amplitude); break;
    case InitialData::Kind::random:
      s.u = random_smooth_field(grid, cfg.initial.seed, cfg.initial.random_amplitude);
      break;
    case InitialData::Kind::samples: s.u = *cfg.initial.samples_u; break;
  }
  if (cfg.equation == Equation::wave) {
    if (cfg.initial.kind == InitialData::Kind::samples && cfg.initial.samples_v) {
      s.v = *cfg.initial.samples_v;
    } else {
      ComplexField v(s.u);
      for (auto& z : v.values()) z *= cfg.initial.velocity_ratio;
      s.v = std::move(v);
    }
  }
  return s;
}

double state_energy(const SimState& s, const DiscreteHamiltonian& H, const SimConfig& cfg) {
  return cfg.equation == Equation::schrodinger ? energy_schrodinger(s.u, H, cfg.p, cfg.strength)
                                               : energy_wave(s.u, *s.v, H, cfg.p, cfg.strength);
}

}  // namespace

SimState initial_state(const SimConfig& cfg, const Grid& grid) {
  double amplitude = cfg.initial.gaussian.amplitude;
  if (cfg.initial.kind == InitialData::Kind::gaussian && cfg.initial.gaussian.tune_amplitude) {
    amplitude = tune_amplitude_for_negative_energy(cfg);
  }
  return state_with_amplitude(cfg, grid, amplitude);
}

double tune_amplitude_for_negative_energy(const SimConfig& cfg) {
  if (cfg.initial.kind != InitialData::Kind::gaussian) {
    throw ConfigError("amplitude tuning needs Gaussian initial data");
  }
  const Grid grid = cfg.make_grid();
  const DiscreteHamiltonian H(cfg.potential, grid);
  // E(a) = a^2 K - a^(p+1) N for the unit-amplitude profile.
  const SimState unit = state_with_amplitude(cfg, grid, 1.0);
  const double quad = 0.5 * covariant_kinetic(unit.u, H) + 0.5 * potential_energy(unit.u, H) +
                      (cfg.equation == Equation::wave ? 0.5 * mass(*unit.v) : 0.0);
  const double margin = cfg.tune.margin_fraction;
  auto target = [&](double a) {
    const SimState s = state_with_amplitude(cfg, grid, a);
    return state_energy(s, H, cfg) + margin * quad * a * a;
  };
  double lo = cfg.tune.a_lo;
  double hi = cfg.tune.a_hi;
  if (!(target(lo) > 0.0) || !(target(hi) < 0.0)) {
    throw ConfigError("no amplitude in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "] gives negative energy");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (target(mid) < 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

RunResult run(const SimConfig& cfg) {
  cfg.validate();
  const Grid grid = cfg.make_grid();
  const DiscreteHamiltonian H(cfg.potential, grid);
  const VirialWeights weights = VirialWeights::from(H);
  RunResult res;
  res.stability_number = stability_number(cfg, H);
  if (res.stability_number > kStabilityBound) {
    throw ConfigError("dt too large for the fixed-step integrator: dt * lambda_max = " +
                      std::to_string(res.stability_number));
  }

  res.amplitude = cfg.initial.gaussian.amplitude;
  if (cfg.initial.kind == InitialData::Kind::gaussian && cfg.initial.gaussian.tune_amplitude) {
    res.amplitude = tune_amplitude_for_negative_energy(cfg);
  }
  SimState state = state_with_amplitude(cfg, grid, res.amplitude);
  const bool wave = cfg.equation == Equation::wave;

  res.series.meta.equation = cfg.equation;
  res.series.meta.dim = cfg.dim;
  res.series.meta.p = cfg.p;
  res.series.meta.extent = cfg.extent;
  res.series.meta.points = cfg.points;
  res.series.meta.dt = cfg.dt;
  res.series.meta.cadence = cfg.cadence;

  Integrator integ(H, cfg.equation, cfg.p, cfg.dealias, cfg.strength);
  const long total_steps = std::lround(cfg.t_end / cfg.dt);

  auto record = [&]() {
    DiagnosticsRecord r = make_record(state.t, state.u, wave ? &*state.v : nullptr, H, weights, cfg.p,
                                      cfg.equation, cfg.boundary_warn, cfg.strength);
    if ((r.flags & kFlagBoundaryMass) && !res.first_boundary_warning) res.first_boundary_warning = r.t;
    res.series.records.push_back(r);
  };

  const StepMonitor first = integ.observe(state);
  res.initial_sup = first.sup;
  res.initial_h1A = first.h1A;
  res.initial_energy = state_energy(state, H, cfg);
  res.initial_Q = wave ? wave_Q(state.u, *state.v, H) : variance_Q(state.u);
  res.initial_Qdot = wave ? 0.0 : q_dot_nls(state.u, H);

  // Returns the trigger name, or empty.
  double max_sup_seen = first.sup;
  auto check = [&](const StepMonitor& m) -> std::string {
    if (!m.finite) return "non_finite";
    if (res.initial_sup > 0.0 && m.sup > cfg.blowup.sup_factor * res.initial_sup) return "sup_norm";
    if (res.initial_h1A > 0.0 && m.h1A > cfg.blowup.h1a_factor * res.initial_h1A) return "h1A";
    if (cfg.blowup.resolution_tail > 0.0 && m.tail_fraction > cfg.blowup.resolution_tail) return "resolution";
    return {};
  };
  auto finish = [&](const std::string& trigger) {
    res.termination.t = state.t;
    res.termination.steps = state.step;
    res.termination.trigger = trigger;
    if (trigger.empty()) {
      res.termination.kind = TerminationReport::Kind::completed;
    } else if (trigger == "non_finite" && !(max_sup_seen > 2.0 * res.initial_sup)) {
      res.termination.kind = TerminationReport::Kind::diverged;
    } else {
      res.termination.kind = TerminationReport::Kind::blowup_detected;
    }
  };

  std::string trigger;
  bool stopped = false;
  while (state.step < total_steps) {
    if (state.step % cfg.cadence == 0) record();
    const double t_before = state.t;
    const long step_before = state.step;
    const StepMonitor mon = integ.step(state, cfg.dt);
    state.t = (step_before + 1) * cfg.dt;
    max_sup_seen = std::max(max_sup_seen, mon.sup);
    trigger = check(mon);
    if (!trigger.empty()) {
      // The monitor describes the state before the step.
      state.t = t_before;
      state.step = step_before;
      stopped = true;
      break;
    }
    if (state.diverged) {
      trigger = "non_finite";
      stopped = true;
      break;
    }
  }
  if (!stopped) {
    const StepMonitor mon = integ.observe(state);
    max_sup_seen = std::max(max_sup_seen, mon.sup);
    trigger = check(mon);
    if (state.step % cfg.cadence == 0 && mon.finite) record();
  }
  finish(trigger);
  fill_virial_residual(res.series);

  const auto& recs = res.series.records;
  if (!recs.empty()) {
    const double m0 = recs.front().mass;
    const double e0 = recs.front().energy;
    for (const auto& r : recs) {
      if (m0 > 0.0) res.max_mass_drift = std::max(res.max_mass_drift, std::abs(r.mass - m0) / m0);
      if (r.sup_norm > 10.0 * res.initial_sup) continue;
      if (e0 != 0.0) res.max_energy_drift = std::max(res.max_energy_drift, std::abs(r.energy - e0) / std::abs(e0));
    }
  }
  return res;
}

}  // namespace magvirial
