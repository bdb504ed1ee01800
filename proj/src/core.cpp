#include "bsvgd/core.hpp"

#include <algorithm>
#include <string>

namespace bsvgd {

Color color_from_char(char c) {
  switch (c) {
    case 'E':
      return Color::Explorer;
    case 'O':
      return Color::Optimizer;
    case 'S':
      return Color::Spine;
    default:
      throw InvalidArgument(std::string("unknown color '") + c + "'");
  }
}

Position make_position(std::span<const double> coords) {
  if (coords.empty()) throw InvalidArgument("position needs at least one coordinate");
  Position x = Eigen::Map<const Eigen::VectorXd>(coords.data(), static_cast<Eigen::Index>(coords.size()));
  if (!x.allFinite()) throw InvalidArgument("position has non-finite coordinates");
  return x;
}

Position make_position(std::initializer_list<double> coords) {
  return make_position(std::span<const double>(coords.begin(), coords.size()));
}

ParticleCloud::ParticleCloud(Positions positions, std::vector<Color> colors)
    : positions_(std::move(positions)), colors_(std::move(colors)) {
  if (positions_.cols() < 1) throw InvalidArgument("empty cloud");
  if (positions_.rows() < 1) throw InvalidArgument("cloud dimension must be at least 1");
  if (static_cast<std::size_t>(positions_.cols()) != colors_.size())
    throw InvalidArgument("cloud has " + std::to_string(positions_.cols()) + " positions but " +
                          std::to_string(colors_.size()) + " colors");
  if (!positions_.allFinite()) throw InvalidArgument("cloud has non-finite coordinates");
}

ParticleCloud::ParticleCloud(Positions positions)
    : ParticleCloud(positions, std::vector<Color>(static_cast<std::size_t>(positions.cols()), Color::Explorer)) {}

namespace {

Positions stack_positions(const std::vector<Particle>& particles) {
  if (particles.empty()) return Positions(0, 0);
  const Eigen::Index d = particles.front().position.size();
  Positions out(d, static_cast<Eigen::Index>(particles.size()));
  for (std::size_t i = 0; i < particles.size(); ++i) {
    if (particles[i].position.size() != d) throw InvalidArgument("particles disagree on dimension");
    out.col(static_cast<Eigen::Index>(i)) = particles[i].position;
  }
  return out;
}

std::vector<Color> collect_colors(const std::vector<Particle>& particles) {
  std::vector<Color> out;
  out.reserve(particles.size());
  for (const auto& p : particles) out.push_back(p.color);
  return out;
}

}  // namespace

ParticleCloud::ParticleCloud(const std::vector<Particle>& particles)
    : ParticleCloud(stack_positions(particles), collect_colors(particles)) {}

Particle ParticleCloud::particle(Eigen::Index i) const {
  if (i < 0 || i >= size()) throw InvalidArgument("particle index out of range");
  return {positions_.col(i), colors_[static_cast<std::size_t>(i)]};
}

std::size_t ParticleCloud::count(Color c) const {
  return static_cast<std::size_t>(std::count(colors_.begin(), colors_.end(), c));
}

ParticleCloud ParticleCloud::with_positions(Positions positions) const {
  if (positions.rows() != positions_.rows() || positions.cols() != positions_.cols())
    throw InvalidArgument("replacement positions change the cloud shape");
  return ParticleCloud(std::move(positions), colors_);
}

Position empirical_mean(const Positions& positions) {
  if (positions.cols() == 0) throw InvalidArgument("empty cloud");
  return positions.rowwise().mean();
}

Position empirical_mean(const ParticleCloud& cloud) { return empirical_mean(cloud.positions()); }

ParticleCloud clone_with_color(const ParticleCloud& cloud, Eigen::Index index, Color new_color) {
  if (index < 0 || index >= cloud.size())
    throw InvalidArgument("index " + std::to_string(index) + " out of range for cloud of size " +
                          std::to_string(cloud.size()));
  auto colors = cloud.colors();
  colors[static_cast<std::size_t>(index)] = new_color;
  return ParticleCloud(cloud.positions(), std::move(colors));
}

}  // namespace bsvgd
