#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "magvirial/io.hpp"
#include "magvirial/verify.hpp"

int main(int argc, char** argv) {
  using namespace magvirial;
  CLI::App app{"Magnetic NLS/NLW virial and blow-up experiments"};
  app.set_version_flag("--version", io::version());
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 1;

  auto* run = app.add_subcommand("run", "Evolve one configuration; writes series.csv and summary.json");
  run->add_option("--config", config, "Run-config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  run->add_option("--seed", seed, "Seed for random initial data");

  auto* hyp = app.add_subcommand("hypotheses", "Print the assumption report of the configured potentials");
  hyp->add_option("--config", config, "Run-config JSON")->required()->check(CLI::ExistingFile);

  std::string suite = "all";
  auto* ver = app.add_subcommand("verify", "Run an acceptance suite");
  ver->add_option("suite", suite, "Suite name or 'all'");
  ver->add_option("--seed", seed, "Seed for random fields");

  auto* scan = app.add_subcommand("scan", "Run the Cartesian parameter grid of a config");
  scan->add_option("--config", config, "Run-config JSON with a scan section")->required()->check(CLI::ExistingFile);
  scan->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  scan->add_option("--seed", seed, "Seed for random initial data");
  scan->add_option("--threads", threads, "Concurrent runs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : io::kExitConfig;
  }

  io::CommandOptions opts;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  if (app.got_subcommand("run") ? run->count("--seed") : scan->count("--seed")) opts.seed = seed;
  opts.threads = threads;

  try {
    if (*run) return io::cmd_run(config, opts, std::cout, std::cerr);
    if (*hyp) return io::cmd_hypotheses(config, std::cout, std::cerr);
    if (*scan) return io::cmd_scan(config, opts, std::cout, std::cerr);
    verify::Options vo = verify::default_options();
    if (ver->count("--seed")) vo.seed = seed;
    return verify::cmd_verify(suite, vo, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kExitFailure;
  }
}
