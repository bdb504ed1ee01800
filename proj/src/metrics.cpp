#include "bsvgd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <string>

namespace bsvgd {

Eigen::MatrixXd squared_distance_matrix(const Positions& a, const Positions& b) {
  if (a.rows() != b.rows()) throw InvalidArgument("clouds differ in dimension");
  Eigen::MatrixXd out(a.cols(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < a.cols(); ++i) out(i, j) = (a.col(i) - b.col(j)).squaredNorm();
  return out;
}

double wasserstein2(const Positions& mu, const Positions& nu) {
  if (mu.cols() != nu.cols()) throw InvalidArgument("empirical Wasserstein requires equal sample sizes");
  if (mu.cols() < 1) throw InvalidArgument("empirical Wasserstein requires nonempty clouds");
  if (mu.rows() != nu.rows()) throw InvalidArgument("clouds differ in dimension");
  const Eigen::MatrixXd cost = squared_distance_matrix(mu, nu);
  const auto result = solve_assignment(cost);
  // Sum the matched costs in sorted order: the value then does not depend on
  // particle order or on which cloud comes first, bit for bit.
  std::vector<double> matched(result.permutation.size());
  for (std::size_t i = 0; i < matched.size(); ++i)
    matched[i] = cost(static_cast<Eigen::Index>(i), result.permutation[i]);
  std::sort(matched.begin(), matched.end());
  double total = 0.0;
  for (double c : matched) total += c;
  return std::sqrt(total / static_cast<double>(mu.cols()));
}

namespace {

Eigen::Index draw_component(const Eigen::VectorXd& weights, SeededRng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (Eigen::Index k = 0; k + 1 < weights.size(); ++k) {
    acc += weights(k);
    if (u < acc) return k;
  }
  return weights.size() - 1;
}

}  // namespace

Positions exact_target_sampler(const GaussianMixture& model, Eigen::Index n, SeededRng& rng) {
  if (n < 1) throw InvalidArgument("sample size must be at least 1");
  const double sigma = std::sqrt(model.variance());
  Positions out(model.dimension(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index k = draw_component(model.weights(), rng);
    out.col(i) = model.means().col(k) + sigma * rng.normal_vector(model.dimension());
  }
  return out;
}

Positions exact_target_sampler(const BananaTMixture& model, Eigen::Index n, SeededRng& rng) {
  if (n < 1) throw InvalidArgument("sample size must be at least 1");
  const Eigen::VectorXd scale_sqrt = model.scale_diagonal().cwiseSqrt();
  Positions out(model.dimension(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = model.components()[static_cast<std::size_t>(draw_component(model.weights(), rng))];
    const Eigen::VectorXd g = rng.normal_vector(model.dimension());
    const double chi2 = 2.0 * rng.gamma(0.5 * c.dof);
    const Eigen::VectorXd z = c.location + scale_sqrt.cwiseProduct(g) / std::sqrt(chi2 / c.dof);
    out.col(i) = banana_forward(z, c.nonlinearity);
  }
  return out;
}

const ScoreModel& as_score_model(const BenchmarkTarget& target) {
  return std::visit([](const auto& m) -> const ScoreModel& { return m; }, target);
}

TargetSampler make_target_sampler(const BenchmarkTarget& target) {
  return std::visit(
      [](const auto& m) -> TargetSampler {
        return [m](Eigen::Index n, SeededRng& rng) { return exact_target_sampler(m, n, rng); };
      },
      target);
}

std::vector<double> w_replicates(const Positions& snapshot, const TargetSampler& sampler, int replicates,
                                 SeededRng& rng, int threads) {
  if (replicates < 1) throw InvalidArgument("number of replicates must be at least 1");
  const SeededRng base(rng.next_u64());
  std::vector<double> out(static_cast<std::size_t>(replicates));
  const int nthreads = std::max(1, threads);
  (void)nthreads;
#pragma omp parallel for num_threads(nthreads) schedule(dynamic, 1)
  for (int a = 0; a < replicates; ++a) {
    SeededRng stream = base.derive(static_cast<std::uint64_t>(a));
    out[static_cast<std::size_t>(a)] = wasserstein2(snapshot, sampler(snapshot.cols(), stream));
  }
  return out;
}

double w_estimator(const Positions& snapshot, const TargetSampler& sampler, int replicates, SeededRng& rng,
                   int threads) {
  const auto values = w_replicates(snapshot, sampler, replicates, rng, threads);
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

DistanceTrajectory trajectory_report(const BsvgdTrace& trace, const TargetSampler& sampler, int replicates,
                                     SeededRng& rng, int threads) {
  DistanceTrajectory out;
  out.reserve(trace.entries.size());
  for (const auto& e : trace.entries) {
    TrajectoryPoint p;
    p.phase_index = e.phase_index;
    p.wall_time_s = e.wall_time_s;
    p.sample_size = e.sample_size();
    p.replicates = w_replicates(e.snapshot.positions(), sampler, replicates, rng, threads);
    double sum = 0.0;
    for (double v : p.replicates) sum += v;
    p.w_mean = sum / static_cast<double>(p.replicates.size());
    out.push_back(std::move(p));
  }
  return out;
}

double atom_diagnostic(const Positions& positions, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("atom tolerance must be positive");
  const Eigen::Index n = positions.cols();
  if (n == 0) return 0.0;
  std::vector<char> in_atom(static_cast<std::size_t>(n), 0);
  const double tol2 = tol * tol;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if ((positions.col(i) - positions.col(j)).squaredNorm() < tol2) {
        in_atom[static_cast<std::size_t>(i)] = 1;
        in_atom[static_cast<std::size_t>(j)] = 1;
      }
  long count = 0;
  for (char c : in_atom) count += c;
  return static_cast<double>(count) / static_cast<double>(n);
}

double atom_diagnostic(const ParticleCloud& cloud, double tol) { return atom_diagnostic(cloud.positions(), tol); }

int mode_coverage(const Positions& positions, const Positions& centers, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("coverage radius must be positive");
  if (positions.cols() > 0 && centers.cols() > 0 && positions.rows() != centers.rows())
    throw InvalidArgument("mode centers differ in dimension");
  int covered = 0;
  const double r2 = radius * radius;
  for (Eigen::Index c = 0; c < centers.cols(); ++c) {
    for (Eigen::Index i = 0; i < positions.cols(); ++i) {
      if ((positions.col(i) - centers.col(c)).squaredNorm() <= r2) {
        ++covered;
        break;
      }
    }
  }
  return covered;
}

int mode_coverage(const ParticleCloud& cloud, const Positions& centers, double radius) {
  return mode_coverage(cloud.positions(), centers, radius);
}

}  // namespace bsvgd
