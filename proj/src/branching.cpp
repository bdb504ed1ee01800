#include "bsvgd/branching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bsvgd {

IntegerLaw::IntegerLaw(std::vector<int> support, std::vector<double> probabilities)
    : support_(std::move(support)), probabilities_(std::move(probabilities)) {
  if (support_.empty()) throw InvalidArgument("offspring law needs a nonempty support");
  if (support_.size() != probabilities_.size()) throw InvalidArgument("offspring law support/probability mismatch");
  for (std::size_t k = 0; k < support_.size(); ++k) {
    if (support_[k] < 0) throw InvalidArgument("offspring counts must be non-negative");
    if (!(probabilities_[k] > 0.0) || !std::isfinite(probabilities_[k]))
      throw InvalidArgument("offspring probabilities must be positive");
    for (std::size_t m = 0; m < k; ++m)
      if (support_[m] == support_[k]) throw InvalidArgument("offspring law lists a value twice");
  }
  const double total = std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidArgument("offspring probabilities sum to " + std::to_string(total) + ", expected 1");
  double acc = 0.0;
  for (double p : probabilities_) {
    acc += p;
    cdf_.push_back(acc);
  }
  cdf_.back() = 1.0;
}

IntegerLaw IntegerLaw::point_mass(int value) { return IntegerLaw({value}, {1.0}); }

IntegerLaw IntegerLaw::uniform(int lo, int hi) {
  if (hi < lo) throw InvalidArgument("empty uniform range");
  std::vector<int> support;
  for (int v = lo; v <= hi; ++v) support.push_back(v);
  const std::size_t n = support.size();
  return IntegerLaw(std::move(support), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double IntegerLaw::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < support_.size(); ++k) m += support_[k] * probabilities_[k];
  return m;
}

double IntegerLaw::probability_of(int value) const {
  for (std::size_t k = 0; k < support_.size(); ++k)
    if (support_[k] == value) return probabilities_[k];
  return 0.0;
}

int IntegerLaw::max_value() const { return *std::max_element(support_.begin(), support_.end()); }

int sample_offspring_count(const IntegerLaw& law, SeededRng& rng) {
  const auto& support = law.support();
  if (support.size() == 1) return support.front();
  const double u = rng.uniform01();
  const auto& cdf = law.cdf();
  for (std::size_t k = 0; k + 1 < support.size(); ++k)
    if (u < cdf[k]) return support[k];
  return support.back();
}

Position sample_proposal(const Eigen::Ref<const Position>& parent, double proposal_std, SeededRng& rng) {
  if (!(proposal_std >= 0.0)) throw InvalidArgument("proposal standard deviation must be non-negative");
  return parent + proposal_std * rng.normal_vector(parent.size());
}

GaussianProposal::GaussianProposal(double std) : std_(std) {
  if (!(std > 0.0) || !std::isfinite(std)) throw InvalidArgument("proposal standard deviation must be positive");
}

Position GaussianProposal::sample(const Eigen::Ref<const Position>& parent, SeededRng& rng) const {
  return sample_proposal(parent, std_, rng);
}

void OffspringLaws::validate() const {
  if (!optimizer.is_point_mass_at(0)) throw InvalidArgument("optimizers must have zero offspring (q_O = 0)");
  if (spine.probability_of(0) > 0.0) throw InvalidArgument("the spine must have at least one offspring");
  if (!proposal) throw InvalidArgument("offspring laws have no proposal kernel");
}

OffspringLaws OffspringLaws::paper_defaults(double proposal_std) {
  return {IntegerLaw({0, 1, 2}, {0.5, 0.2, 0.3}), IntegerLaw::point_mass(0), IntegerLaw::uniform(1, 3),
          std::make_shared<GaussianProposal>(proposal_std)};
}

BranchOutcome branch_step(const ParticleCloud& cloud, const OffspringLaws& laws, SeededRng& rng) {
  laws.validate();
  const auto spines = cloud.count(Color::Spine);
  if (spines != 1)
    throw InvalidArgument("branching needs exactly one spine, cloud has " + std::to_string(spines));

  const Eigen::Index n = cloud.size();
  const Eigen::Index d = cloud.dimension();
  BranchOutcome out{cloud, {}, {}, 0};
  out.offspring_counts.reserve(static_cast<std::size_t>(n));

  std::vector<Position> children;
  std::vector<Eigen::Index> child_parent;
  for (Eigen::Index i = 0; i < n; ++i) {
    int gamma = 0;
    switch (cloud.color(i)) {
      case Color::Explorer:
        gamma = sample_offspring_count(laws.explorer, rng);
        break;
      case Color::Spine:
        gamma = sample_offspring_count(laws.spine, rng);
        break;
      case Color::Optimizer:
        break;
    }
    out.offspring_counts.push_back(gamma);
    for (int j = 0; j < gamma; ++j) {
      children.push_back(laws.proposal->sample(cloud.positions().col(i), rng));
      child_parent.push_back(i);
    }
  }

  const Eigen::Index total = n + static_cast<Eigen::Index>(children.size());
  Positions positions(d, total);
  positions.leftCols(n) = cloud.positions();
  for (std::size_t c = 0; c < children.size(); ++c) positions.col(n + static_cast<Eigen::Index>(c)) = children[c];

  std::vector<Color> colors(static_cast<std::size_t>(n), Color::Optimizer);
  colors.resize(static_cast<std::size_t>(total), Color::Explorer);
  out.spine_index = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(total)));
  colors[static_cast<std::size_t>(out.spine_index)] = Color::Spine;

  out.parent.resize(static_cast<std::size_t>(total));
  std::iota(out.parent.begin(), out.parent.begin() + n, Eigen::Index{0});
  std::copy(child_parent.begin(), child_parent.end(), out.parent.begin() + n);

  out.cloud = ParticleCloud(std::move(positions), std::move(colors));
  return out;
}

}  // namespace bsvgd
