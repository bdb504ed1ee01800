#pragma once

#include "bsvgd/core.hpp"
#include "bsvgd/kernels.hpp"
#include "bsvgd/targets.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace bsvgd {

/// Euler step sizes eps_d.
struct StepSchedule {
  enum class Kind { Constant, Sigmoid };

  Kind kind = Kind::Constant;
  double e_start = 0.1;
  double e_end = 0.1;
  /// Horizon M of the sigmoid; unused by Constant.
  long horizon = 1;

  static StepSchedule constant(double eps);
  /// eps_d = e_start - (e_start - e_end) / (1 + exp(-0.01 (d - M/2)))
  static StepSchedule sigmoid(double e_start, double e_end, long horizon);

  void validate() const;
};

/// Step size for iteration d (0-based). Sigmoid requires 0 <= d <= horizon.
double step_size(const StepSchedule& schedule, long d);

struct SvgdConfig {
  StepSchedule schedule;
  long max_iterations = 2000;
  /// Stop once the mean particle displacement of an iteration is <= threshold.
  double threshold = 1e-3;
  std::shared_ptr<const SmoothKernel> kernel;
  /// 0 means resolve from BSVGD_THREADS / OpenMP.
  int threads = 0;

  void validate() const;
};

struct SvgdRunReport {
  Positions final_positions;
  long iterations_used = 0;
  double final_displacement = 0.0;
  std::vector<double> iteration_seconds;
};

/// Called after every completed update with the 1-based iteration count, the new
/// positions and the cumulative measured seconds of the updates so far (observer time excluded).
using IterationObserver = std::function<void(long iteration, const Positions& positions, double seconds)>;

/// Stein direction of particle i, evaluated term by term:
///   (1/l) sum_j [ k(x_j, x_i) score(x_j) + grad_1 k(x_j, x_i) ].
Position svgd_direction(const Positions& positions, Eigen::Index i, const ScoreModel& model,
                        const SmoothKernel& kernel);

/// All l directions from the same positions (synchronous update).
Positions svgd_directions(const Positions& positions, const ScoreModel& model, const SmoothKernel& kernel,
                          int threads = 0);

/// Euler iteration x^{d+1} = x^d + eps_d phi(x^d) until d = M or the mean
/// displacement h <= threshold. Throws DivergenceError on non-finite values.
SvgdRunReport svgd_iterate(const Positions& positions, const ScoreModel& model, const SvgdConfig& config,
                           const IterationObserver& observer = {});

}  // namespace bsvgd
