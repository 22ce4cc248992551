#pragma once

// Acceptance suites with pinned tolerances. Shared by `magvirial verify` and
// the acceptance test binary.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace magvirial::verify {

struct Check {
  std::string name;
  double value = 0.0;
  /// "<=": pass iff value <= tolerance * scale. "bool": pass iff value != 0,
  /// unaffected by the scale.
  std::string relation = "<=";
  double tolerance = 0.0;
  bool pass = false;
};

struct SuiteResult {
  std::string id;     // C1 .. C10
  std::string name;   // suite name accepted by run_suite
  std::vector<Check> checks;
  /// Free-form rows (e.g. residual against resolution), printed after the table.
  std::vector<std::string> table;
  std::string error;  // set when the suite threw
  double seconds = 0.0;

  bool pass() const;
};

struct Options {
  /// Multiplies every "<=" tolerance; read from MAGVIRIAL_TOL_SCALE by default.
  double tol_scale = 1.0;
  /// Scratch space for suites that write files.
  std::filesystem::path work_dir;
  std::uint64_t seed = 7;
};

/// MAGVIRIAL_TOL_SCALE if set to a positive number, else 1.
double tolerance_scale_from_env();
Options default_options();

/// In acceptance order.
std::vector<std::string> suite_names();
std::string suite_id(const std::string& name);
/// Throws std::invalid_argument for an unknown name.
SuiteResult run_suite(const std::string& name, const Options& opts);

/// One line: status, id, name, check count, worst check, runtime.
std::string summary_line(const SuiteResult& r);
/// Machine-readable table: one "suite,check,value,relation,tolerance,pass" row per check.
void write_table(std::ostream& os, const SuiteResult& r);

/// `suite` may be "all". Exit 0 iff every check passes, 2 for an unknown suite.
int cmd_verify(const std::string& suite, const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace magvirial::verify
