#include "bsvgd/svgd.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace bsvgd {

StepSchedule StepSchedule::constant(double eps) {
  StepSchedule s;
  s.kind = Kind::Constant;
  s.e_start = s.e_end = eps;
  s.validate();
  return s;
}

StepSchedule StepSchedule::sigmoid(double e_start, double e_end, long horizon) {
  StepSchedule s;
  s.kind = Kind::Sigmoid;
  s.e_start = e_start;
  s.e_end = e_end;
  s.horizon = horizon;
  s.validate();
  return s;
}

void StepSchedule::validate() const {
  if (kind == Kind::Constant) {
    if (!(e_start > 0.0) || !std::isfinite(e_start)) throw InvalidArgument("constant step size must be positive");
    return;
  }
  if (!(e_end > 0.0) || !(e_start >= e_end) || !std::isfinite(e_start))
    throw InvalidArgument("sigmoid schedule needs e_start >= e_end > 0");
  if (horizon < 1) throw InvalidArgument("sigmoid schedule horizon must be at least 1");
}

double step_size(const StepSchedule& schedule, long d) {
  if (d < 0) throw InvalidArgument("iteration index must be non-negative");
  if (schedule.kind == StepSchedule::Kind::Constant) return schedule.e_start;
  if (d > schedule.horizon)
    throw InvalidArgument("iteration " + std::to_string(d) + " beyond schedule horizon " +
                          std::to_string(schedule.horizon));
  const double mid = 0.5 * static_cast<double>(schedule.horizon);
  return schedule.e_start -
         (schedule.e_start - schedule.e_end) / (1.0 + std::exp(-0.01 * (static_cast<double>(d) - mid)));
}

void SvgdConfig::validate() const {
  schedule.validate();
  if (max_iterations < 1) throw InvalidArgument("svgd.max_iterations must be at least 1");
  if (!(threshold > 0.0)) throw InvalidArgument("svgd.threshold must be positive");
  if (!kernel) throw InvalidArgument("svgd config has no kernel");
  if (schedule.kind == StepSchedule::Kind::Sigmoid && schedule.horizon < max_iterations)
    throw InvalidArgument("sigmoid schedule horizon is shorter than svgd.max_iterations");
}

Position svgd_direction(const Positions& positions, Eigen::Index i, const ScoreModel& model,
                        const SmoothKernel& kernel) {
  const Eigen::Index n = positions.cols();
  if (i < 0 || i >= n) throw InvalidArgument("particle index out of range");
  const auto xi = positions.col(i);
  Position acc = Position::Zero(positions.rows());
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto xj = positions.col(j);
    acc += kernel.eval(xj, xi) * model.score(xj) + kernel.grad_first(xj, xi);
  }
  acc /= static_cast<double>(n);
  if (!acc.allFinite()) throw DivergenceError("divergent dynamics: non-finite Stein direction", 0);
  return acc;
}

Positions svgd_directions(const Positions& positions, const ScoreModel& model, const SmoothKernel& kernel,
                          int threads) {
  const Positions scores = model.scores(positions);
  return kernel.stein_directions(positions, scores, threads);
}

SvgdRunReport svgd_iterate(const Positions& positions, const ScoreModel& model, const SvgdConfig& config,
                           const IterationObserver& observer) {
  config.validate();
  if (positions.cols() < 1) throw InvalidArgument("svgd needs at least one particle");
  if (positions.rows() != model.dimension()) throw InvalidArgument("particle dimension does not match the target");
  if (!positions.allFinite()) throw InvalidArgument("initial positions are not finite");

  using clock = std::chrono::steady_clock;
  SvgdRunReport report;
  Positions x = positions;
  const double n = static_cast<double>(x.cols());
  long d = 0;
  double h = 2.0 * config.threshold;
  double total_seconds = 0.0;
  while (d < config.max_iterations && h > config.threshold) {
    const auto start = clock::now();
    const Positions phi = svgd_directions(x, model, *config.kernel, config.threads);
    if (!phi.allFinite())
      throw DivergenceError("divergent dynamics at iteration " + std::to_string(d) + ": non-finite direction", d);
    const double eps = step_size(config.schedule, d);
    const Positions step = eps * phi;
    x += step;
    if (!x.allFinite())
      throw DivergenceError("divergent dynamics at iteration " + std::to_string(d) + ": non-finite position", d);
    h = step.colwise().norm().sum() / n;
    ++d;
    const double seconds = std::chrono::duration<double>(clock::now() - start).count();
    report.iteration_seconds.push_back(seconds);
    total_seconds += seconds;
    if (observer) observer(d, x, total_seconds);
  }
  report.final_positions = std::move(x);
  report.iterations_used = d;
  report.final_displacement = h;
  return report;
}

}  // namespace bsvgd
