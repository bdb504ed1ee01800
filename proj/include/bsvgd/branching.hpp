#pragma once

#include "bsvgd/core.hpp"
#include "bsvgd/rng.hpp"

#include <memory>
#include <vector>

namespace bsvgd {

/// Distribution on a finite subset of the non-negative integers.
class IntegerLaw {
 public:
  /// Probabilities must be positive and sum to one within 1e-12; they are stored as given.
  IntegerLaw(std::vector<int> support, std::vector<double> probabilities);

  static IntegerLaw point_mass(int value);
  /// Uniform on {lo, ..., hi}.
  static IntegerLaw uniform(int lo, int hi);

  const std::vector<int>& support() const noexcept { return support_; }
  const std::vector<double>& probabilities() const noexcept { return probabilities_; }
  /// Cumulative probabilities; the last entry is exactly 1.
  const std::vector<double>& cdf() const noexcept { return cdf_; }

  double mean() const;
  double probability_of(int value) const;
  int max_value() const;
  bool is_point_mass_at(int value) const { return support_.size() == 1 && support_.front() == value; }

  friend bool operator==(const IntegerLaw&, const IntegerLaw&) = default;

 private:
  std::vector<int> support_;
  std::vector<double> probabilities_;
  std::vector<double> cdf_;
};

/// Inverse-CDF draw; consumes exactly one uniform, except for point masses which consume none.
int sample_offspring_count(const IntegerLaw& law, SeededRng& rng);

/// Markov kernel P(. | x) placing an offspring given its parent.
class ProposalKernel {
 public:
  virtual ~ProposalKernel() = default;
  virtual Position sample(const Eigen::Ref<const Position>& parent, SeededRng& rng) const = 0;
};

/// parent + std * z, z standard normal in R^d.
Position sample_proposal(const Eigen::Ref<const Position>& parent, double proposal_std, SeededRng& rng);

class GaussianProposal final : public ProposalKernel {
 public:
  explicit GaussianProposal(double std);
  double std() const noexcept { return std_; }
  Position sample(const Eigen::Ref<const Position>& parent, SeededRng& rng) const override;

 private:
  double std_;
};

struct OffspringLaws {
  IntegerLaw explorer = IntegerLaw({0, 1, 2}, {0.5, 0.2, 0.3});
  IntegerLaw optimizer = IntegerLaw::point_mass(0);
  IntegerLaw spine = IntegerLaw::uniform(1, 3);
  std::shared_ptr<const ProposalKernel> proposal;

  /// q_O must be the point mass at 0 and q_S must not charge 0.
  void validate() const;

  /// q_E = {0: 0.5, 1: 0.2, 2: 0.3}, q_O = 0, q_S uniform on {1, 2, 3}, isotropic Gaussian proposal.
  static OffspringLaws paper_defaults(double proposal_std);
};

struct BranchOutcome {
  ParticleCloud cloud;
  /// Offspring count drawn for each input particle.
  std::vector<int> offspring_counts;
  /// For each output index, the input index it descends from (itself for pre-existing particles).
  std::vector<Eigen::Index> parent;
  Eigen::Index spine_index = 0;
};

/// One transition of the branching kernel:
///  - each particle draws an offspring count from the law of its color,
///    then the positions of its offspring from the proposal (parents in index order);
///  - offspring are appended in parent order and colored Explorer;
///  - every pre-existing particle keeps its position and becomes Optimizer;
///  - one particle, uniform over the whole output, becomes the Spine.
BranchOutcome branch_step(const ParticleCloud& cloud, const OffspringLaws& laws, SeededRng& rng);

}  // namespace bsvgd
