#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "magvirial/io.hpp"

using namespace magvirial;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "equation": "schrodinger",
  "dim": 2,
  "grid": {"extent": 8.0, "points": 32},
  "time": {"dt": 0.002, "t_end": 0.02, "cadence": 5},
  "potential": {"magnetic": {"family": "linear_M", "field_scale": 0.5}},
  "initial": {"kind": "gaussian", "amplitude": 1.0}
})";

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "magvirial-unit" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::string parse_error(const std::string& text) {
  try {
    io::parse_config(text);
  } catch (const io::ConfigParseError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, Defaults) {
  const io::RunConfigFile c = io::parse_config("{}");
  EXPECT_EQ(c.sim.equation, Equation::schrodinger);
  EXPECT_EQ(c.sim.dim, 2);
  EXPECT_EQ(c.sim.p, 3.0);
  EXPECT_FALSE(c.scan);
}

TEST(Config, SyntaxErrorReportsLineAndColumn) {
  const std::string msg = parse_error("{\n  \"dim\": 2,\n  \"grid\": {\"points\": 32,}\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(Config, TypeErrorsNameTheKey) {
  EXPECT_NE(parse_error(R"({"grid": {"points": "many"}})").find("key 'grid.points'"), std::string::npos);
  EXPECT_NE(parse_error(R"({"dim": 2.5})").find("key 'dim'"), std::string::npos);
  EXPECT_NE(parse_error(R"({"equation": "heat"})").find("key 'equation'"), std::string::npos);
  EXPECT_NE(parse_error(R"({"potential": {"magnetic": {"family": "custom_sampled"}}})").find("potential.magnetic.family"),
            std::string::npos);
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_NE(parse_error(R"({"dimension": 2})").find("key 'dimension'"), std::string::npos);
  EXPECT_NE(parse_error(R"({"time": {"dt": 0.1, "tend": 1}})").find("key 'time.tend'"), std::string::npos);
}

TEST(Config, FinalizeAppliesTaperAndScale) {
  io::RunConfigFile c = io::parse_config(kSmall);
  io::finalize(c);
  const PotentialSpec& s = c.sim.potential;
  ASSERT_TRUE(s.matrix);
  EXPECT_EQ((*s.matrix)(1, 0), 0.5);
  ASSERT_TRUE(s.taper);
  EXPECT_DOUBLE_EQ(s.taper->inner, 6.4);
  EXPECT_DOUBLE_EQ(s.taper->outer, 7.6);
}

TEST(Config, SingularEpsilonDefaultsToTwoSpacings) {
  io::RunConfigFile c = io::parse_config(R"({"dim": 3, "grid": {"points": 16, "extent": 4},
    "potential": {"magnetic": {"family": "singular_r2"}}})");
  io::prepare_potential(c);
  EXPECT_DOUBLE_EQ(c.sim.potential.epsilon, 2 * 0.5);
}

TEST(Config, TaperOnlyForLinearField) {
  io::RunConfigFile c = io::parse_config(R"({"dim": 3, "grid": {"points": 16},
    "potential": {"magnetic": {"family": "singular_r2", "taper": {"inner": 1, "outer": 2}}}})");
  EXPECT_THROW(io::prepare_potential(c), io::ConfigParseError);
}

TEST(Hash, StableAndSensitive) {
  io::RunConfigFile a = io::parse_config(kSmall);
  io::RunConfigFile b = io::parse_config(kSmall);
  io::finalize(a);
  io::finalize(b);
  EXPECT_EQ(io::config_hash(a), io::config_hash(b));
  EXPECT_EQ(io::config_hash(a).size(), 16u);
  io::apply_parameter(b, "amplitude", 1.5);
  EXPECT_NE(io::config_hash(a), io::config_hash(b));
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(2.0), "2");
  EXPECT_EQ(io::format_double(1e-300), "1e-300");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(io::format_double(x)), x);
}

TEST(Format, SeriesCsv) {
  TimeSeries ts;
  DiagnosticsRecord r;
  r.t = 0.5;
  r.mass = 1.0;
  r.Qdot = 2.0;
  ts.records.push_back(r);
  std::ostringstream os;
  io::write_series_csv(os, ts);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), io::kSeriesHeader);
  const std::string row = text.substr(text.find('\n') + 1);
  EXPECT_EQ(row, "0.5,1,0,0,2,0,,0,0,0,,,\n");
}

TEST(Scan, GridEnumeratesLastAxisFastest) {
  io::ScanGrid g;
  EXPECT_EQ(g.size(), 0u);
  g.axes = {{"amplitude", {1, 2}}, {"width", {0.5, 1, 1.5}}};
  EXPECT_EQ(g.size(), 6u);
  const auto p = g.point(1);
  EXPECT_EQ(p[0].second, 1.0);
  EXPECT_EQ(p[1].second, 1.0);
  EXPECT_EQ(g.point(5)[0].second, 2.0);
}

TEST(Commands, RunWritesOutputs) {
  const fs::path dir = scratch("run");
  std::ostringstream out, err;
  io::CommandOptions opts;
  opts.out_dir = dir / "out";
  EXPECT_EQ(io::cmd_run(write(dir, kSmall), opts, out, err), io::kExitOk) << err.str();
  EXPECT_TRUE(fs::exists(dir / "out" / "series.csv"));
  const auto summary = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  EXPECT_EQ(summary["termination"], "completed");
  EXPECT_EQ(summary["version"], io::version());
  EXPECT_EQ(summary["config_hash"].get<std::string>().size(), 16u);
}

TEST(Commands, ExitCodes) {
  const fs::path dir = scratch("codes");
  std::ostringstream out, err;
  EXPECT_EQ(io::cmd_run(dir / "missing.json", {}, out, err), io::kExitConfig);
  EXPECT_EQ(io::cmd_run(write(dir, "{\"dim\": }"), {}, out, err), io::kExitConfig);
  EXPECT_NE(err.str().find("line 1"), std::string::npos);
  EXPECT_EQ(io::cmd_run(write(dir, R"({"time": {"dt": 0.5}, "grid": {"points": 64}})"), {}, out, err),
            io::kExitConfig);
}

TEST(Commands, HypothesesInFourDimensions) {
  const fs::path dir = scratch("hyp");
  std::ostringstream out, err;
  const fs::path cfg = write(dir, R"({"dim": 4, "grid": {"points": 16},
    "potential": {"magnetic": {"family": "linear_M"}}})");
  EXPECT_EQ(io::cmd_hypotheses(cfg, out, err), io::kExitOk) << err.str();
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["dim"], 4);
}

TEST(Commands, EmptyScanIsAConfigError) {
  const fs::path dir = scratch("scan-empty");
  std::ostringstream out, err;
  io::CommandOptions opts;
  opts.out_dir = dir / "out";
  EXPECT_EQ(io::cmd_scan(write(dir, R"({"scan": {}})"), opts, out, err), io::kExitConfig);
  EXPECT_EQ(io::cmd_scan(write(dir, "{}"), opts, out, err), io::kExitConfig);
}

TEST(Commands, AmplitudeScanCrossesZeroEnergyAtTwo) {
  const fs::path dir = scratch("scan");
  std::ostringstream out, err;
  io::CommandOptions opts;
  opts.out_dir = dir / "out";
  opts.threads = 2;
  const fs::path cfg = write(dir, R"({"grid": {"extent": 12, "points": 64},
    "time": {"dt": 0.001, "t_end": 0.005, "cadence": 5},
    "initial": {"kind": "gaussian"},
    "scan": {"amplitude": [1.9, 1.99, 2.01, 2.1]}})");
  ASSERT_EQ(io::cmd_scan(cfg, opts, out, err), io::kExitOk) << err.str();
  const auto rows = nlohmann::json::parse(slurp(dir / "out" / "scan.json"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_GT(rows[0]["initial"]["energy"].get<double>(), 0.0);
  EXPECT_GT(rows[1]["initial"]["energy"].get<double>(), 0.0);
  EXPECT_LT(rows[2]["initial"]["energy"].get<double>(), 0.0);
  EXPECT_LT(rows[3]["initial"]["energy"].get<double>(), 0.0);
  const std::string csv = slurp(dir / "out" / "scan.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')).rfind("index,amplitude,termination", 0), 0u);
}
