#pragma once

// Run-config files, the series.csv / summary.json formats and the command
// surface shared by the CLI and the acceptance binary.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "magvirial/dynamics.hpp"
#include "magvirial/potentials.hpp"

namespace magvirial::io {

std::string version();

/// Config text that failed to parse or validate. `where` is "line L, column C"
/// for syntax errors and the dotted key path otherwise.
class ConfigParseError : public ConfigError {
 public:
  ConfigParseError(const std::string& where, const std::string& what);
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Parameter lists of a scan, in the fixed order amplitude, p, coupling,
/// field_scale, points, dt.
struct ScanGrid {
  std::vector<std::pair<std::string, std::vector<double>>> axes;

  std::size_t size() const noexcept;
  /// Parameter values of point `index`; the last axis varies fastest.
  std::vector<std::pair<std::string, double>> point(std::size_t index) const;
};

struct RunConfigFile {
  SimConfig sim;
  HypothesisParams hypotheses;
  // linear_M choices. The spec's matrix and taper are derived from these by
  // prepare_potential, so scans over extent or field_scale stay consistent.
  double field_scale = 1.0;
  std::optional<AntisymMatrix> base_matrix;  // default build_M(n)
  enum class TaperMode { automatic, none, fixed };
  TaperMode taper_mode = TaperMode::automatic;
  Taper fixed_taper;
  /// Singular families; default 2h.
  std::optional<double> epsilon;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  std::optional<ScanGrid> scan;
  /// Directory of the config file, for relative sample paths.
  std::filesystem::path base_dir;
  std::optional<std::filesystem::path> samples_u_path;
  std::optional<std::filesystem::path> samples_v_path;
};

RunConfigFile parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfigFile load_config(const std::filesystem::path& path);
/// Fills cfg.sim.potential from the magnetic choices and grid; validates it.
void prepare_potential(RunConfigFile& cfg);
/// prepare_potential, file-backed initial data, full SimConfig validation.
void finalize(RunConfigFile& cfg);
/// Applies one scan point; unknown parameter names throw ConfigError.
void apply_parameter(RunConfigFile& cfg, const std::string& name, double value);

/// Every physical parameter with defaults filled in, as compact JSON.
std::string echo_json(const RunConfigFile& cfg);
/// FNV-1a 64 of echo_json, as 16 hex digits.
std::string config_hash(const RunConfigFile& cfg);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

inline constexpr const char* kSeriesHeader =
    "t,mass,energy,Q,Qdot,Qddot_rhs,virial_residual,sup_norm,h1A,boundary_mass_frac,F,Fdot,Hfun";
void write_series_csv(std::ostream& os, const TimeSeries& series);

struct RunBounds {
  QuadraticBoundReport quadratic;             // C = 8
  std::optional<double> parabola_root_16;     // root of 16 E0 t^2 + Qdot0 t + Q0
  std::optional<LevineReport> levine;
};

RunBounds evaluate_bounds(const RunConfigFile& cfg, const RunResult& result, const AssumptionReport& report);

std::string assumption_report_json(const AssumptionReport& report, int indent = 2);
std::string summary_json(const RunConfigFile& cfg, const RunResult& result, const AssumptionReport& report,
                         const RunBounds& bounds);

/// Exit codes: 0 ok, 1 I/O or internal failure, 2 config error, 3 diverged run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;

struct CommandOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

int cmd_run(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_hypotheses(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_scan(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace magvirial::io
