#include "bsvgd/bsvgd.hpp"

#include <chrono>
#include <string>

namespace bsvgd {

double precision_default(long level) {
  if (level < 1) throw InvalidArgument("precision rule needs level >= 1");
  return 1.0 / static_cast<double>(level);
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::PostSvgd:
      return "post-svgd";
    case Phase::PostBranch:
      return "post-branch";
    case Phase::SvgdIteration:
      return "svgd-iter";
  }
  return "unknown";
}

Phase phase_from_string(std::string_view text) {
  if (text == "post-svgd") return Phase::PostSvgd;
  if (text == "post-branch") return Phase::PostBranch;
  if (text == "svgd-iter") return Phase::SvgdIteration;
  throw InvalidArgument("unknown phase '" + std::string(text) + "'");
}

void BsvgdConfig::validate() const {
  svgd.validate();
  laws.validate();
  if (!precision) throw InvalidArgument("bsvgd precision rule is empty");
  if (!initial_cloud) throw InvalidArgument("bsvgd needs an initial cloud");
  if (!initial_cloud->is_branching_state()) throw InvalidArgument("initial cloud must contain exactly one spine");
  if (max_population < initial_cloud->size())
    throw InvalidArgument("bsvgd.max_population is smaller than the initial population");
  if (snapshot_every < 0) throw InvalidArgument("snapshot interval must be non-negative");
}

ParticleCloud initial_spine_cloud(Eigen::Index dimension, long count, double std, SeededRng& rng) {
  if (count < 1) throw InvalidArgument("initial population must be at least 1");
  if (!(std >= 0.0)) throw InvalidArgument("initial standard deviation must be non-negative");
  Positions x(dimension, count);
  for (long i = 0; i < count; ++i) x.col(i) = std * rng.normal_vector(dimension);
  std::vector<Color> colors(static_cast<std::size_t>(count), Color::Explorer);
  colors.front() = Color::Spine;
  return ParticleCloud(std::move(x), std::move(colors));
}

BsvgdTrace run_bsvgd(const BsvgdConfig& config, const ScoreModel& model) {
  config.validate();
  using clock = std::chrono::steady_clock;
  const auto run_start = clock::now();

  SeededRng rng(config.seed);
  BsvgdTrace trace;
  ParticleCloud cloud = *config.initial_cloud;
  double elapsed = 0.0;
  long phase_index = 0;

  auto refine = [&](long level) {
    SvgdConfig svgd = config.svgd;
    svgd.threshold = config.precision(level);
    const double pair_work = static_cast<double>(cloud.size()) * static_cast<double>(cloud.size());
    const double phase_start = elapsed;

    IterationObserver observer;
    if (config.snapshot_every > 0) {
      observer = [&](long iteration, const Positions& x, double seconds) {
        if (iteration % config.snapshot_every != 0) return;
        const double t = phase_start + (config.clock == ClockMode::Wall
                                            ? seconds
                                            : static_cast<double>(iteration) * pair_work * kWorkSecondsPerUnit);
        trace.entries.push_back(TraceEntry{phase_index++, level, Phase::SvgdIteration, t, cloud.with_positions(x),
                                           iteration, 0.0, svgd.threshold});
      };
    }

    SvgdRunReport report;
    try {
      report = svgd_iterate(cloud.positions(), model, svgd, observer);
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " (population level " + std::to_string(level) + ")",
                            e.iteration(), level);
    }

    if (config.clock == ClockMode::Wall) {
      for (double s : report.iteration_seconds) elapsed += s;
    } else {
      elapsed = phase_start + static_cast<double>(report.iterations_used) * pair_work * kWorkSecondsPerUnit;
    }
    // the post-svgd entry supersedes an iteration snapshot of the last update
    if (!trace.entries.empty() && trace.entries.back().phase == Phase::SvgdIteration &&
        trace.entries.back().svgd_iterations == report.iterations_used) {
      trace.entries.pop_back();
      --phase_index;
    }

    cloud = cloud.with_positions(std::move(report.final_positions));
    trace.entries.push_back(TraceEntry{phase_index++, level, Phase::PostSvgd, elapsed, cloud,
                                       report.iterations_used, report.final_displacement, svgd.threshold});
  };

  long level = cloud.size();
  while (level <= config.max_population) {
    refine(level);

    const auto branch_start = clock::now();
    BranchOutcome outcome = branch_step(cloud, config.laws, rng);
    const double branch_seconds = std::chrono::duration<double>(clock::now() - branch_start).count();
    cloud = std::move(outcome.cloud);
    elapsed += config.clock == ClockMode::Wall ? branch_seconds
                                               : static_cast<double>(cloud.size()) * kWorkSecondsPerUnit;
    trace.entries.push_back(TraceEntry{phase_index++, level, Phase::PostBranch, elapsed, cloud, 0, 0.0, 0.0});
    level = cloud.size();
  }
  if (config.final_refinement) refine(level);

  trace.measured_seconds = std::chrono::duration<double>(clock::now() - run_start).count();
  return trace;
}

}  // namespace bsvgd
