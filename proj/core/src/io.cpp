#include "magvirial/io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#ifndef MAGVIRIAL_VERSION
#define MAGVIRIAL_VERSION "0.0.0"
#endif

namespace magvirial::io {

using nlohmann::json;

std::string version() { return MAGVIRIAL_VERSION; }

ConfigParseError::ConfigParseError(const std::string& where, const std::string& what)
    : ConfigError(where + ": " + what), where_(where) {}

// ---------------------------------------------------------------- scan grid

std::size_t ScanGrid::size() const noexcept {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& [name, values] : axes) n *= values.size();
  return n;
}

std::vector<std::pair<std::string, double>> ScanGrid::point(std::size_t index) const {
  std::vector<std::pair<std::string, double>> out(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    const auto& values = axes[k].second;
    out[k] = {axes[k].first, values[index % values.size()]};
    index /= values.size();
  }
  return out;
}

// ---------------------------------------------------------------- parsing

namespace {

// Typed access to one JSON object; remembers the keys it was asked about so
// finish() can reject the rest.
class Reader {
 public:
  Reader(const json* j, std::string path) : j_(j), path_(std::move(path)) {
    if (j_ != nullptr && !j_->is_object()) throw ConfigParseError(where(), "expected an object");
  }

  bool has(const std::string& k) {
    seen_.insert(k);
    return j_ != nullptr && j_->contains(k) && !j_->at(k).is_null();
  }

  double number(const std::string& k, double def) {
    if (!has(k)) return def;
    const json& v = j_->at(k);
    if (!v.is_number()) throw ConfigParseError(key(k), "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& k, std::int64_t def) {
    if (!has(k)) return def;
    const json& v = j_->at(k);
    if (!v.is_number_integer()) throw ConfigParseError(key(k), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const std::string& k, std::uint64_t def) {
    if (!has(k)) return def;
    const json& v = j_->at(k);
    if (!v.is_number_unsigned()) throw ConfigParseError(key(k), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& k, bool def) {
    if (!has(k)) return def;
    const json& v = j_->at(k);
    if (!v.is_boolean()) throw ConfigParseError(key(k), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& k, const std::string& def) {
    if (!has(k)) return def;
    const json& v = j_->at(k);
    if (!v.is_string()) throw ConfigParseError(key(k), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& k) {
    if (!has(k)) return {};
    const json& v = j_->at(k);
    if (!v.is_array()) throw ConfigParseError(key(k), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigParseError(key(k), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::vector<double>> matrix(const std::string& k) {
    const json& v = j_->at(k);
    if (!v.is_array()) throw ConfigParseError(key(k), "expected an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& r : v) {
      if (!r.is_array()) throw ConfigParseError(key(k), "expected an array of rows");
      std::vector<double> row;
      for (const auto& e : r) {
        if (!e.is_number()) throw ConfigParseError(key(k), "matrix entries must be numbers");
        row.push_back(e.get<double>());
      }
      rows.push_back(std::move(row));
    }
    return rows;
  }

  const json* raw(const std::string& k) {
    seen_.insert(k);
    return j_ != nullptr && j_->contains(k) ? &j_->at(k) : nullptr;
  }

  Reader child(const std::string& k) {
    seen_.insert(k);
    const json* c = j_ != nullptr && j_->contains(k) && !j_->at(k).is_null() ? &j_->at(k) : nullptr;
    return Reader(c, child_path(k));
  }

  void finish() const {
    if (j_ == nullptr) return;
    for (const auto& item : j_->items()) {
      if (!seen_.count(item.key())) throw ConfigParseError(key(item.key()), "unknown key");
    }
  }

  std::string key(const std::string& k) const { return "key '" + (path_.empty() ? k : path_ + "." + k) + "'"; }
  std::string where() const { return path_.empty() ? "document root" : "key '" + path_ + "'"; }
  std::string child_path(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

 private:
  const json* j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <class Fn>
auto keyed(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigParseError(where, e.what());
  }
}

void parse_potential(Reader& root, RunConfigFile& cfg) {
  Reader pot = root.child("potential");
  PotentialSpec& spec = cfg.sim.potential;
  spec.dim = cfg.sim.dim;

  Reader mag = pot.child("magnetic");
  const std::string mfam = mag.string("family", "zero");
  spec.magnetic = keyed(mag.key("family"), [&] { return magnetic_family_from_string(mfam); });
  if (spec.magnetic == MagneticFamily::custom_sampled) {
    throw ConfigParseError(mag.key("family"), "custom_sampled potentials are only available through the library");
  }
  cfg.field_scale = mag.number("field_scale", 1.0);
  if (mag.has("matrix")) {
    const auto rows = mag.matrix("matrix");
    cfg.base_matrix = keyed(mag.key("matrix"), [&] { return AntisymMatrix::from_rows(rows); });
  }
  if (const json* t = mag.raw("taper"); t != nullptr && !t->is_null()) {
    if (t->is_boolean()) {
      cfg.taper_mode = t->get<bool>() ? RunConfigFile::TaperMode::automatic : RunConfigFile::TaperMode::none;
    } else {
      Reader tr(t, mag.child_path("taper"));
      if (!tr.has("inner") || !tr.has("outer")) {
        throw ConfigParseError(mag.key("taper"), "expected true, false or {\"inner\", \"outer\"}");
      }
      cfg.taper_mode = RunConfigFile::TaperMode::fixed;
      cfg.fixed_taper = Taper{tr.number("inner", 0.0), tr.number("outer", 0.0)};
      tr.finish();
    }
  }
  if (mag.has("epsilon")) cfg.epsilon = mag.number("epsilon", 0.0);
  mag.finish();

  Reader el = pot.child("electric");
  const std::string efam = el.string("family", "zero");
  spec.electric = keyed(el.key("family"), [&] { return electric_family_from_string(efam); });
  if (spec.electric == ElectricFamily::custom_sampled) {
    throw ConfigParseError(el.key("family"), "custom_sampled potentials are only available through the library");
  }
  spec.coupling = el.number("coupling", spec.electric == ElectricFamily::zero ? 0.0 : 1.0);
  el.finish();
  pot.finish();
}

void parse_initial(Reader& root, RunConfigFile& cfg) {
  Reader in = root.child("initial");
  InitialData& init = cfg.sim.initial;
  const std::string kind = in.string("kind", "gaussian");
  if (kind == "zero") {
    init.kind = InitialData::Kind::zero;
  } else if (kind == "gaussian") {
    init.kind = InitialData::Kind::gaussian;
  } else if (kind == "random") {
    init.kind = InitialData::Kind::random;
  } else if (kind == "file") {
    init.kind = InitialData::Kind::samples;
  } else {
    throw ConfigParseError(in.key("kind"), "expected zero, gaussian, random or file");
  }
  GaussianData& g = init.gaussian;
  g.amplitude = in.number("amplitude", g.amplitude);
  g.tune_amplitude = in.boolean("tune_amplitude", false);
  g.width = in.number("width", g.width);
  g.center = in.numbers("center");
  g.velocity = in.numbers("velocity");
  g.chirp = in.number("chirp", 0.0);
  init.velocity_ratio = in.number("velocity_ratio", init.velocity_ratio);
  init.random_amplitude = in.number("random_amplitude", 1.0);
  if (in.has("u_file")) cfg.samples_u_path = in.string("u_file", "");
  if (in.has("v_file")) cfg.samples_v_path = in.string("v_file", "");
  if (init.kind == InitialData::Kind::samples && !cfg.samples_u_path) {
    throw ConfigParseError(in.key("u_file"), "required for file initial data");
  }
  in.finish();
}

void parse_scan(Reader& root, RunConfigFile& cfg) {
  if (!root.has("scan")) return;
  Reader sc = root.child("scan");
  ScanGrid grid;
  for (const char* name : {"amplitude", "width", "p", "strength", "coupling", "field_scale", "points", "dt", "t_end"}) {
    if (!sc.has(name)) continue;
    grid.axes.emplace_back(name, sc.numbers(name));
  }
  sc.finish();
  cfg.scan = std::move(grid);
}

}  // namespace

RunConfigFile parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ConfigParseError(line_column(text, e.byte), msg);
  }
  RunConfigFile cfg;
  cfg.base_dir = base_dir;
  Reader root(&doc, "");
  SimConfig& sim = cfg.sim;

  const std::string eq = root.string("equation", "schrodinger");
  sim.equation = keyed(root.key("equation"), [&] { return equation_from_string(eq); });
  sim.dim = static_cast<int>(root.integer("dim", 2));
  sim.p = root.number("p", 3.0);
  sim.strength = root.number("strength", 1.0);
  sim.dealias = root.boolean("dealias", true);
  sim.boundary_warn = root.number("boundary_warn", sim.boundary_warn);
  cfg.seed = root.unsigned_integer("seed", 0);

  Reader grid = root.child("grid");
  sim.extent = grid.number("extent", sim.extent);
  sim.points = static_cast<int>(grid.integer("points", sim.points));
  grid.finish();

  Reader time = root.child("time");
  sim.dt = time.number("dt", sim.dt);
  sim.t_end = time.number("t_end", sim.t_end);
  sim.cadence = static_cast<int>(time.integer("cadence", sim.cadence));
  time.finish();

  parse_potential(root, cfg);
  parse_initial(root, cfg);

  Reader bl = root.child("blowup");
  sim.blowup.sup_factor = bl.number("sup_factor", sim.blowup.sup_factor);
  sim.blowup.h1a_factor = bl.number("h1a_factor", sim.blowup.h1a_factor);
  sim.blowup.resolution_tail = bl.number("resolution_tail", sim.blowup.resolution_tail);
  bl.finish();

  Reader tu = root.child("tune");
  sim.tune.a_lo = tu.number("a_lo", sim.tune.a_lo);
  sim.tune.a_hi = tu.number("a_hi", sim.tune.a_hi);
  sim.tune.margin_fraction = tu.number("margin_fraction", sim.tune.margin_fraction);
  tu.finish();

  Reader hy = root.child("hypotheses");
  cfg.hypotheses.strichartz_m = hy.number("strichartz_m", cfg.hypotheses.strichartz_m);
  cfg.hypotheses.kato_radius = hy.number("kato_radius", cfg.hypotheses.kato_radius);
  hy.finish();

  Reader out = root.child("output");
  cfg.out_dir = out.string("dir", cfg.out_dir.string());
  out.finish();

  parse_scan(root, cfg);
  root.finish();
  sim.initial.seed = cfg.seed;
  return cfg;
}

RunConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigParseError(path.string(), "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

void prepare_potential(RunConfigFile& cfg) {
  PotentialSpec& spec = cfg.sim.potential;
  spec.dim = cfg.sim.dim;
  spec.matrix.reset();
  spec.taper.reset();
  spec.epsilon = 0.0;
  const Grid grid = keyed("grid", [&] { return cfg.sim.make_grid(); });
  if (spec.magnetic == MagneticFamily::linear_M) {
    const AntisymMatrix base = cfg.base_matrix ? *cfg.base_matrix : build_M(cfg.sim.dim);
    if (base.dim() != cfg.sim.dim) throw ConfigParseError("key 'potential.magnetic.matrix'", "size must equal dim");
    spec.matrix = base.scaled(cfg.field_scale);
    if (cfg.taper_mode == RunConfigFile::TaperMode::automatic) {
      spec.taper = Taper{0.8 * cfg.sim.extent, 0.95 * cfg.sim.extent};
    } else if (cfg.taper_mode == RunConfigFile::TaperMode::fixed) {
      spec.taper = cfg.fixed_taper;
    }
  } else if (cfg.taper_mode == RunConfigFile::TaperMode::fixed) {
    throw ConfigParseError("key 'potential.magnetic.taper'", "a taper applies to linear_M only");
  }
  if (spec.magnetic == MagneticFamily::singular_r2 || spec.magnetic == MagneticFamily::singular_cyl) {
    spec.epsilon = cfg.epsilon ? *cfg.epsilon : 2.0 * grid.spacing();
  } else if (cfg.epsilon) {
    spec.epsilon = *cfg.epsilon;
  }
  keyed("key 'potential'", [&] {
    spec.validate();
    return 0;
  });
}

namespace {

std::shared_ptr<const ComplexField> read_samples(const std::filesystem::path& path, const Grid& grid,
                                                 const std::string& key) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError(key, "cannot open " + path.string());
  auto field = std::make_shared<ComplexField>(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double re = 0.0;
    double im = 0.0;
    if (!(in >> re >> im)) {
      throw ConfigParseError(key, path.string() + ": expected " + std::to_string(grid.size()) + " lines of 're im'");
    }
    (*field)[i] = cplx(re, im);
  }
  return field;
}

}  // namespace

void finalize(RunConfigFile& cfg) {
  prepare_potential(cfg);
  if (cfg.sim.initial.kind == InitialData::Kind::samples) {
    const Grid grid = cfg.sim.make_grid();
    auto resolve = [&](const std::filesystem::path& p) { return p.is_absolute() ? p : cfg.base_dir / p; };
    cfg.sim.initial.samples_u = read_samples(resolve(*cfg.samples_u_path), grid, "key 'initial.u_file'");
    if (cfg.samples_v_path) {
      cfg.sim.initial.samples_v = read_samples(resolve(*cfg.samples_v_path), grid, "key 'initial.v_file'");
    }
  }
  keyed("config", [&] {
    cfg.sim.validate();
    return 0;
  });
}

void apply_parameter(RunConfigFile& cfg, const std::string& name, double value) {
  SimConfig& s = cfg.sim;
  if (name == "amplitude") {
    s.initial.gaussian.amplitude = value;
    s.initial.gaussian.tune_amplitude = false;
  } else if (name == "width") {
    s.initial.gaussian.width = value;
  } else if (name == "p") {
    s.p = value;
  } else if (name == "strength") {
    s.strength = value;
  } else if (name == "coupling") {
    s.potential.coupling = value;
  } else if (name == "field_scale") {
    cfg.field_scale = value;
  } else if (name == "points") {
    if (value != std::floor(value)) throw ConfigError("scan value for points must be an integer");
    s.points = static_cast<int>(value);
  } else if (name == "dt") {
    s.dt = value;
  } else if (name == "t_end") {
    s.t_end = value;
  } else {
    throw ConfigError("unknown scan parameter '" + name + "'");
  }
}

// ---------------------------------------------------------------- echo

namespace {

json echo(const RunConfigFile& cfg) {
  const SimConfig& s = cfg.sim;
  const PotentialSpec& spec = s.potential;
  json j;
  j["equation"] = to_string(s.equation);
  j["dim"] = s.dim;
  j["p"] = s.p;
  j["strength"] = s.strength;
  j["dealias"] = s.dealias;
  j["boundary_warn"] = s.boundary_warn;
  j["seed"] = cfg.seed;
  j["grid"] = {{"extent", s.extent}, {"points", s.points}};
  j["time"] = {{"dt", s.dt}, {"t_end", s.t_end}, {"cadence", s.cadence}};
  json mag;
  mag["family"] = to_string(spec.magnetic);
  mag["field_scale"] = cfg.field_scale;
  mag["matrix"] = spec.matrix ? json(spec.matrix->rows()) : json(nullptr);
  mag["taper"] = spec.taper ? json{{"inner", spec.taper->inner}, {"outer", spec.taper->outer}} : json(nullptr);
  mag["epsilon"] = spec.epsilon;
  j["potential"] = {{"magnetic", mag}, {"electric", {{"family", to_string(spec.electric)}, {"coupling", spec.coupling}}}};
  const InitialData& in = s.initial;
  json init;
  switch (in.kind) {
    case InitialData::Kind::zero: init["kind"] = "zero"; break;
    case InitialData::Kind::gaussian: init["kind"] = "gaussian"; break;
    case InitialData::Kind::random: init["kind"] = "random"; break;
    case InitialData::Kind::samples: init["kind"] = "file"; break;
  }
  init["amplitude"] = in.gaussian.amplitude;
  init["tune_amplitude"] = in.gaussian.tune_amplitude;
  init["width"] = in.gaussian.width;
  init["center"] = in.gaussian.center;
  init["velocity"] = in.gaussian.velocity;
  init["chirp"] = in.gaussian.chirp;
  init["velocity_ratio"] = in.velocity_ratio;
  init["random_amplitude"] = in.random_amplitude;
  init["u_file"] = cfg.samples_u_path ? json(cfg.samples_u_path->generic_string()) : json(nullptr);
  init["v_file"] = cfg.samples_v_path ? json(cfg.samples_v_path->generic_string()) : json(nullptr);
  j["initial"] = init;
  j["blowup"] = {{"sup_factor", s.blowup.sup_factor},
                 {"h1a_factor", s.blowup.h1a_factor},
                 {"resolution_tail", s.blowup.resolution_tail}};
  j["tune"] = {{"a_lo", s.tune.a_lo}, {"a_hi", s.tune.a_hi}, {"margin_fraction", s.tune.margin_fraction}};
  j["hypotheses"] = {{"strichartz_m", cfg.hypotheses.strichartz_m}, {"kato_radius", cfg.hypotheses.kato_radius}};
  return j;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string echo_json(const RunConfigFile& cfg) { return echo(cfg).dump(); }

std::string config_hash(const RunConfigFile& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : echo_json(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------- csv

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_series_csv(std::ostream& os, const TimeSeries& series) {
  os << kSeriesHeader << '\n';
  auto cell = [&](const std::optional<double>& v) {
    if (v) os << format_double(*v);
  };
  for (const auto& r : series.records) {
    os << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.energy) << ','
       << format_double(r.Q) << ',';
    cell(r.Qdot);
    os << ',' << format_double(r.Qddot_rhs) << ',';
    cell(r.virial_residual);
    os << ',' << format_double(r.sup_norm) << ',' << format_double(r.h1A) << ','
       << format_double(r.boundary_mass_frac) << ',';
    cell(r.F);
    os << ',';
    cell(r.Fdot);
    os << ',';
    cell(r.Hfun);
    os << '\n';
  }
}

// ---------------------------------------------------------------- summary

RunBounds evaluate_bounds(const RunConfigFile& cfg, const RunResult& result, const AssumptionReport& report) {
  RunBounds b;
  const SimConfig& s = cfg.sim;
  if (s.equation == Equation::schrodinger) {
    const double E0 = result.initial_energy;
    std::string reason;
    if (!(E0 < 0.0)) reason = "E_S(0) >= 0";
    if (!s.potential.trapping_free()) reason = "B_tau is not identically zero";
    if (report.condition_i_min < 0.0) reason = "V + |x| V_r / 2 < 0 somewhere";
    if (!s.mass_critical_or_supercritical()) reason = "p < 1 + 4/n";
    if (s.strength != 1.0) reason = "nonlinearity strength differs from 1";
    const double slack = 1e-6 * std::max(1.0, result.initial_Q);
    b.quadratic = quadratic_bound_check(result.series, E0, result.initial_Qdot, result.initial_Q, reason.empty(),
                                        slack, 8.0);
    if (!reason.empty()) b.quadratic.reason = reason;
    if (E0 < 0.0) b.parabola_root_16 = parabola_positive_root(16.0 * E0, result.initial_Qdot, result.initial_Q);
  } else {
    b.levine = levine_diagnostics(result.series, s.p);
  }
  return b;
}

namespace {

json report_json(const AssumptionReport& r) {
  json j;
  j["dim"] = r.dim;
  j["kato_radius"] = r.kato_radius;
  j["kato_norm_V_minus"] = opt(r.kato_norm_V_minus);
  j["kato_threshold"] = opt(r.kato_threshold);
  j["sup_x2_trapping"] = r.sup_x2_trapping;
  j["sup_x32_trapping"] = r.sup_x32_trapping;
  j["rt_x3_trapping"] = r.rt_x3_trapping;
  j["rt_x3_field"] = r.rt_x3_field;
  j["sup_x3_radial_dV_plus"] = r.sup_x3_radial_dV_plus;
  j["rt_x2_radial_dV_plus"] = r.rt_x2_radial_dV_plus;
  j["coulomb_residual"] = r.coulomb_residual;
  j["condition_i_min"] = r.condition_i_min;
  j["V_min"] = r.V_min;
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"relation", c.relation},
                      {"applicable", c.applicable},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"pass", c.pass}});
  }
  j["checks"] = checks;
  j["all_smallness_pass"] = r.all_smallness_pass();
  return j;
}

json bounds_json(const RunBounds& b) {
  json j;
  if (b.levine) {
    const LevineReport& l = *b.levine;
    j["levine"] = {{"alpha", l.alpha},
                   {"concavity_ok", l.concavity_ok},
                   {"max_second_diff", l.max_second_diff},
                   {"T_bound", opt(l.T_bound)}};
  } else {
    const QuadraticBoundReport& q = b.quadratic;
    j["quadratic"] = {{"applicable", q.applicable},
                      {"reason", q.reason},
                      {"coefficient", q.coefficient},
                      {"holds", q.holds},
                      {"first_violation_t", opt(q.first_violation_t)},
                      {"min_margin", q.min_margin},
                      {"parabola_root", opt(q.parabola_root)},
                      {"fitted_coefficient", opt(q.fitted_coefficient)},
                      {"parabola_root_16", opt(b.parabola_root_16)}};
  }
  return j;
}

json summary(const RunConfigFile& cfg, const RunResult& res, const AssumptionReport& report, const RunBounds& b) {
  const SimConfig& s = cfg.sim;
  const Grid grid = s.make_grid();
  json j;
  j["version"] = version();
  j["config_hash"] = config_hash(cfg);
  j["config"] = echo(cfg);
  j["grid"] = {{"dim", s.dim}, {"extent", s.extent}, {"points", s.points}, {"spacing", grid.spacing()}};
  j["epsilon"] = s.potential.epsilon;
  j["taper"] = s.potential.taper ? json{{"inner", s.potential.taper->inner}, {"outer", s.potential.taper->outer}}
                                 : json(nullptr);
  const TerminationReport& t = res.termination;
  j["termination"] = to_string(t.kind);
  j["t_detect"] = t.kind == TerminationReport::Kind::blowup_detected ? json(t.t) : json(nullptr);
  j["t_final"] = t.t;
  j["trigger"] = t.trigger.empty() ? json(nullptr) : json(t.trigger);
  j["steps"] = t.steps;
  j["initial"] = {{"amplitude", res.amplitude}, {"energy", res.initial_energy}, {"Q", res.initial_Q},
                  {"Qdot", s.equation == Equation::schrodinger ? json(res.initial_Qdot) : json(nullptr)},
                  {"sup_norm", res.initial_sup}, {"h1A", res.initial_h1A}};
  j["max_mass_drift"] = res.max_mass_drift;
  j["max_energy_drift"] = res.max_energy_drift;
  j["first_boundary_warning"] = opt(res.first_boundary_warning);
  j["stability_number"] = res.stability_number;
  j["bounds"] = bounds_json(b);
  j["assumptions"] = report_json(report);
  return j;
}

}  // namespace

std::string assumption_report_json(const AssumptionReport& report, int indent) {
  return report_json(report).dump(indent);
}

std::string summary_json(const RunConfigFile& cfg, const RunResult& result, const AssumptionReport& report,
                         const RunBounds& bounds) {
  return summary(cfg, result, report, bounds).dump(2);
}

// ---------------------------------------------------------------- commands

namespace {

struct Outcome {
  RunResult result;
  AssumptionReport report;
  RunBounds bounds;
};

Outcome execute(const RunConfigFile& cfg) {
  Outcome o;
  o.result = run(cfg.sim);
  o.result.series.meta.config_hash = config_hash(cfg);
  o.report = hypothesis_report(cfg.sim.potential, cfg.sim.make_grid(), cfg.hypotheses);
  o.bounds = evaluate_bounds(cfg, o.result, o.report);
  return o;
}

int exit_code(const RunResult& r) {
  return r.termination.kind == TerminationReport::Kind::diverged ? kExitDiverged : kExitOk;
}

bool write_file(const std::filesystem::path& path, const std::string& content, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) {
    err << "error: cannot write " << path.string() << '\n';
    return false;
  }
  return true;
}

RunConfigFile load_with_overrides(const std::filesystem::path& path, const CommandOptions& opts) {
  RunConfigFile cfg = load_config(path);
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.sim.initial.seed = *opts.seed;
  }
  return cfg;
}

}  // namespace

int cmd_run(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfigFile cfg;
  try {
    cfg = load_with_overrides(config, opts);
    finalize(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  Outcome o;
  try {
    o = execute(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) {
    err << "error: cannot create " << cfg.out_dir.string() << ": " << ec.message() << '\n';
    return kExitFailure;
  }
  std::ostringstream csv;
  write_series_csv(csv, o.result.series);
  if (!write_file(cfg.out_dir / "series.csv", csv.str(), err)) return kExitFailure;
  if (!write_file(cfg.out_dir / "summary.json", summary_json(cfg, o.result, o.report, o.bounds) + "\n", err)) {
    return kExitFailure;
  }
  const TerminationReport& t = o.result.termination;
  out << to_string(t.kind) << " t=" << format_double(t.t);
  if (!t.trigger.empty()) out << " trigger=" << t.trigger;
  out << " records=" << o.result.series.records.size() << " out=" << cfg.out_dir.string() << '\n';
  return exit_code(o.result);
}

int cmd_hypotheses(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  try {
    RunConfigFile cfg = load_config(config);
    prepare_potential(cfg);
    const AssumptionReport r = hypothesis_report(cfg.sim.potential, cfg.sim.make_grid(), cfg.hypotheses);
    out << assumption_report_json(r) << '\n';
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_scan(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfigFile base;
  std::vector<RunConfigFile> points;
  std::vector<std::vector<std::pair<std::string, double>>> params;
  try {
    base = load_with_overrides(config, opts);
    if (!base.scan || base.scan->size() == 0) {
      throw ConfigParseError("key 'scan'", "the parameter grid is empty");
    }
    for (std::size_t k = 0; k < base.scan->size(); ++k) {
      RunConfigFile c = base;
      c.scan.reset();
      params.push_back(base.scan->point(k));
      for (const auto& [name, value] : params.back()) apply_parameter(c, name, value);
      try {
        finalize(c);
      } catch (const ConfigError& e) {
        throw ConfigError("scan point " + std::to_string(k) + ": " + e.what());
      }
      points.push_back(std::move(c));
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::vector<json> rows(points.size());
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < points.size(); k = next++) {
      try {
        const Outcome o = execute(points[k]);
        rows[k] = summary(points[k], o.result, o.report, o.bounds);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  const int threads = std::clamp(opts.threads, 1, static_cast<int>(points.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "index";
  for (const auto& [name, v] : params.front()) csv << ',' << name;
  csv << ",termination,trigger,t_final,amplitude,energy0,Q0,max_mass_drift,max_energy_drift,config_hash\n";
  json all = json::array();
  int code = kExitOk;
  for (std::size_t k = 0; k < points.size(); ++k) {
    csv << k;
    for (const auto& [name, v] : params[k]) csv << ',' << format_double(v);
    if (!errors[k].empty()) {
      csv << ",error,,,,,,,," << config_hash(points[k]) << '\n';
      err << "scan point " << k << ": " << errors[k] << '\n';
      all.push_back({{"error", errors[k]}});
      code = kExitConfig;
      continue;
    }
    const json& r = rows[k];
    csv << ',' << r["termination"].get<std::string>() << ','
        << (r["trigger"].is_null() ? std::string() : r["trigger"].get<std::string>()) << ','
        << format_double(r["t_final"].get<double>()) << ',' << format_double(r["initial"]["amplitude"].get<double>())
        << ',' << format_double(r["initial"]["energy"].get<double>()) << ','
        << format_double(r["initial"]["Q"].get<double>()) << ',' << format_double(r["max_mass_drift"].get<double>())
        << ',' << format_double(r["max_energy_drift"].get<double>()) << ',' << r["config_hash"].get<std::string>()
        << '\n';
    all.push_back(r);
    if (r["termination"] == "diverged" && code == kExitOk) code = kExitDiverged;
  }
  std::error_code ec;
  std::filesystem::create_directories(base.out_dir, ec);
  if (ec) {
    err << "error: cannot create " << base.out_dir.string() << ": " << ec.message() << '\n';
    return kExitFailure;
  }
  if (!write_file(base.out_dir / "scan.csv", csv.str(), err)) return kExitFailure;
  if (!write_file(base.out_dir / "scan.json", all.dump(2) + "\n", err)) return kExitFailure;
  out << points.size() << " scan points written to " << base.out_dir.string() << '\n';
  return code;
}

}  // namespace magvirial::io
