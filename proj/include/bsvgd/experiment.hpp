#pragma once

#include "bsvgd/branching.hpp"
#include "bsvgd/bsvgd.hpp"
#include "bsvgd/config.hpp"
#include "bsvgd/metrics.hpp"
#include "bsvgd/svgd.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bsvgd {

enum class Algorithm { Svgd, Bsvgd };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view text);

std::string_view to_string(ClockMode c);
ClockMode clock_from_string(std::string_view text);

/// Fully resolved experiment description.
struct RunConfig {
  Algorithm algorithm = Algorithm::Bsvgd;
  std::uint64_t seed = 0;

  /// Name of the preset the target came from, empty for inline targets.
  std::string target_preset;
  BenchmarkTarget target = paper_gauss25();

  double kernel_bandwidth = 1.0;

  long max_iterations = 2000;
  double threshold = 1e-3;
  StepSchedule schedule = StepSchedule::sigmoid(1.0, 0.01, 2000);
  long svgd_initial_count = 500;
  double svgd_initial_std = 1.0;
  long svgd_snapshot_every = 20;

  IntegerLaw q_explorer = IntegerLaw({0, 1, 2}, {0.5, 0.2, 0.3});
  IntegerLaw q_spine = IntegerLaw::uniform(1, 3);
  double proposal_std = 2.0;

  long max_population = 500;
  long bsvgd_initial_count = 1;
  double bsvgd_initial_std = 1.0;
  bool final_refinement = true;
  long bsvgd_snapshot_every = 0;

  bool metrics_enabled = true;
  int replicates = 10;

  ClockMode clock = ClockMode::Wall;
  /// Intra-run threads; 0 resolves from BSVGD_THREADS.
  int threads = 0;

  const ScoreModel& model() const { return as_score_model(target); }
  SvgdConfig svgd_config() const;
  OffspringLaws offspring_laws() const;
};

/// Reads a config file, or a preset when `path_or_preset` names one.
/// A file with a top-level `preset = "<name>"` key is layered over that preset.
ConfigDocument load_config_document(const std::string& path_or_preset);

/// Validates every key; errors carry the offending line.
RunConfig resolve_run_config(const ConfigDocument& doc);

/// Config text that resolves back to `config`.
std::string to_config_text(const RunConfig& config);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view text);

struct RunResult {
  BsvgdTrace trace;
  DistanceTrajectory metrics;
  /// Plain SVGD only: whether the stopping rule fired before max_iterations.
  bool svgd_converged = false;
  long svgd_iterations = 0;
};

/// Plain SVGD from standard-normal initial particles; snapshots every
/// svgd_snapshot_every iterations plus the final post-svgd state.
BsvgdTrace run_svgd_trace(const RunConfig& config);

/// Runs the configured algorithm and, when enabled, its W trajectory.
/// Stream layout from the seed: derive(1) initial positions, derive(2) branching, derive(3) metrics.
RunResult execute_run(const RunConfig& config);

/// Writes trace.csv, snapshots/, metrics.csv and run.json into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const RunConfig& config, const RunResult& result,
                       double total_seconds);

struct TraceRow {
  long phase_index;
  long level;
  Phase phase;
  double wall_time_s;
  long sample_size;
  std::string snapshot_file;
};

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);
DistanceTrajectory read_metrics_csv(const std::filesystem::path& path);

void write_trace_csv(std::ostream& out, const BsvgdTrace& trace);
void write_metrics_csv(std::ostream& out, const DistanceTrajectory& metrics);

/// Merged table over several run directories; see README for the columns.
struct ReportOutput {
  std::string csv;
  std::string json;
};
ReportOutput build_report(const std::vector<std::filesystem::path>& run_dirs);

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDivergence = 3;

struct RunCommandOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "bsvgd-run";
  std::optional<std::string> algorithm;
  int replicas = 1;
  std::optional<long> snapshot_every;
  std::optional<std::string> clock;
  std::vector<std::string> overrides;
};

int cmd_run(const RunCommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_wasserstein(const std::string& file_a, const std::string& file_b, std::ostream& out, std::ostream& err);
int cmd_report(const std::vector<std::string>& run_dirs, const std::optional<std::string>& out_dir,
               std::ostream& out, std::ostream& err);
int cmd_presets(const std::optional<std::string>& name, std::ostream& out, std::ostream& err);

}  // namespace bsvgd
