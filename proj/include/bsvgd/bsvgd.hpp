#pragma once

#include "bsvgd/branching.hpp"
#include "bsvgd/core.hpp"
#include "bsvgd/svgd.hpp"
#include "bsvgd/targets.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace bsvgd {

/// eta(l) = 1 / l.
double precision_default(long level);

using PrecisionRule = std::function<double(long level)>;

/// How trace timestamps are produced.
///  - Wall: cumulative monotonic-clock seconds spent in the algorithm.
///  - Work: deterministic cost clock, 1e-8 s per kernel pair interaction in an
///    SVGD iteration and per particle emitted by a branch step. Makes traces
///    byte-reproducible.
enum class ClockMode { Wall, Work };

inline constexpr double kWorkSecondsPerUnit = 1e-8;

enum class Phase { PostSvgd, PostBranch, SvgdIteration };

std::string_view to_string(Phase phase);
Phase phase_from_string(std::string_view text);

struct TraceEntry {
  long phase_index = 0;
  /// Population l the phase operated on (for a branch: the pre-branch size).
  long level = 0;
  Phase phase = Phase::PostSvgd;
  /// Cumulative algorithm time at the end of the phase.
  double wall_time_s = 0.0;
  ParticleCloud snapshot;
  /// SVGD phases only: iterations run, last mean displacement, threshold used.
  long svgd_iterations = 0;
  double displacement = 0.0;
  double threshold = 0.0;

  Eigen::Index sample_size() const { return snapshot.size(); }
};

struct BsvgdTrace {
  std::vector<TraceEntry> entries;
  /// Measured monotonic seconds regardless of the clock mode.
  double measured_seconds = 0.0;

  const TraceEntry& final_entry() const { return entries.back(); }
};

struct BsvgdConfig {
  SvgdConfig svgd;
  PrecisionRule precision = precision_default;
  OffspringLaws laws;
  long max_population = 500;
  std::optional<ParticleCloud> initial_cloud;
  std::uint64_t seed = 0;
  /// Refine the population produced by the last branch so the returned cloud is post-SVGD.
  bool final_refinement = true;
  /// Record an SvgdIteration snapshot every k iterations inside each SVGD phase (0 = off).
  long snapshot_every = 0;
  ClockMode clock = ClockMode::Wall;

  void validate() const;
};

/// Single Spine particle with standard-normal coordinates scaled by `std`, drawn from `rng`.
ParticleCloud initial_spine_cloud(Eigen::Index dimension, long count, double std, SeededRng& rng);

/// Alternates SVGD refinement at precision eta(l) with one branch step while l <= L.
/// The branching stream is SeededRng(config.seed).
BsvgdTrace run_bsvgd(const BsvgdConfig& config, const ScoreModel& model);

}  // namespace bsvgd
