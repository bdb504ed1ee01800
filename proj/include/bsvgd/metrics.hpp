#pragma once

#include "bsvgd/assignment.hpp"
#include "bsvgd/bsvgd.hpp"
#include "bsvgd/core.hpp"
#include "bsvgd/rng.hpp"
#include "bsvgd/targets.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace bsvgd {

/// Empirical 2-Wasserstein distance between equal-size clouds (columns are points):
///   min over permutations sigma of sqrt( (1/l) sum_j |x_j - y_sigma(j)|^2 ).
double wasserstein2(const Positions& mu, const Positions& nu);

/// Matrix of squared Euclidean distances between the columns of a and b.
Eigen::MatrixXd squared_distance_matrix(const Positions& a, const Positions& b);

/// Draws n i.i.d. target points as columns.
using TargetSampler = std::function<Positions(Eigen::Index n, SeededRng& rng)>;

/// Component by categorical(weights), then mean + sqrt(variance) z.
Positions exact_target_sampler(const GaussianMixture& model, Eigen::Index n, SeededRng& rng);
/// Component by categorical(weights), then location + Sigma^{1/2} z / sqrt(chi2_r / r), pushed through the shear.
Positions exact_target_sampler(const BananaTMixture& model, Eigen::Index n, SeededRng& rng);

using BenchmarkTarget = std::variant<GaussianMixture, BananaTMixture>;

const ScoreModel& as_score_model(const BenchmarkTarget& target);
TargetSampler make_target_sampler(const BenchmarkTarget& target);

/// The A distances d_W(snapshot, fresh target sample), one per replicate.
/// Replicate a uses the stream SeededRng(base).derive(a), where base is one draw from rng.
std::vector<double> w_replicates(const Positions& snapshot, const TargetSampler& sampler, int replicates,
                                 SeededRng& rng, int threads = 1);

/// Mean of w_replicates.
double w_estimator(const Positions& snapshot, const TargetSampler& sampler, int replicates, SeededRng& rng,
                   int threads = 1);

struct TrajectoryPoint {
  long phase_index = 0;
  double wall_time_s = 0.0;
  Eigen::Index sample_size = 0;
  double w_mean = 0.0;
  std::vector<double> replicates;
};

using DistanceTrajectory = std::vector<TrajectoryPoint>;

/// One W estimate per snapshot, the reference sample size matched to each snapshot.
DistanceTrajectory trajectory_report(const BsvgdTrace& trace, const TargetSampler& sampler, int replicates,
                                     SeededRng& rng, int threads = 1);

/// Fraction of particles that have another particle at distance < tol.
double atom_diagnostic(const Positions& positions, double tol);
double atom_diagnostic(const ParticleCloud& cloud, double tol);

/// Number of centers with at least one particle within `radius`.
int mode_coverage(const Positions& positions, const Positions& centers, double radius);
int mode_coverage(const ParticleCloud& cloud, const Positions& centers, double radius);

}  // namespace bsvgd
