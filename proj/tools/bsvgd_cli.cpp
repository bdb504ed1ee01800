// bsvgd: run SVGD / BSVGD experiments and evaluate their outputs.
#include "bsvgd/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace bsvgd;

  CLI::App app{"Branched Stein variational gradient descent experiments", "bsvgd"};
  app.set_version_flag("--version", std::string(BSVGD_VERSION));
  app.require_subcommand(1);

  RunCommandOptions run_opts;
  std::uint64_t seed = 0;
  long snapshot_every = 0;
  std::string algorithm, clock;
  auto* run = app.add_subcommand("run", "execute one seeded run and write its artifacts");
  run->add_option("--config", run_opts.config, "config file or preset name")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", run_opts.out, "output directory")->capture_default_str();
  auto* algo_opt = run->add_option("--algorithm", algorithm, "svgd or bsvgd");
  run->add_option("--replicas", run_opts.replicas, "independent seeds seed..seed+N-1, run concurrently")
      ->check(CLI::PositiveNumber);
  auto* snap_opt = run->add_option("--snapshot-every", snapshot_every, "intra-phase snapshot interval (0 = off)");
  auto* clock_opt = run->add_option("--clock", clock, "wall or work (deterministic work clock)");
  run->add_option("--set", run_opts.overrides, "override a config key, key=value");

  std::string file_a, file_b;
  auto* wass = app.add_subcommand("wasserstein", "print the empirical 2-Wasserstein distance of two snapshots");
  wass->add_option("file_a", file_a)->required();
  wass->add_option("file_b", file_b)->required();

  std::vector<std::string> run_dirs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "merge run directories into one comparison table");
  report->add_option("run_dirs", run_dirs)->required();
  auto* report_out_opt = report->add_option("--out", report_out, "write report.csv and report.json here");

  std::string preset_name;
  auto* presets = app.add_subcommand("presets", "print the embedded preset configs");
  auto* preset_opt = presets->add_option("name", preset_name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*run) {
    if (*seed_opt) run_opts.seed = seed;
    if (*algo_opt) run_opts.algorithm = algorithm;
    if (*snap_opt) run_opts.snapshot_every = snapshot_every;
    if (*clock_opt) run_opts.clock = clock;
    return cmd_run(run_opts, std::cout, std::cerr);
  }
  if (*wass) return cmd_wasserstein(file_a, file_b, std::cout, std::cerr);
  if (*report)
    return cmd_report(run_dirs, *report_out_opt ? std::optional<std::string>(report_out) : std::nullopt, std::cout,
                      std::cerr);
  return cmd_presets(*preset_opt ? std::optional<std::string>(preset_name) : std::nullopt, std::cout, std::cerr);
}
