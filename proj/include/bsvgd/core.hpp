#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsvgd {

/// A point of the state space R^d.
using Position = Eigen::VectorXd;

/// Particle positions stored column-wise: column i is particle i, rows are coordinates.
using Positions = Eigen::MatrixXd;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when particle dynamics produce non-finite coordinates.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long iteration, long level = -1)
      : std::runtime_error(what), iteration_(iteration), level_(level) {}

  long iteration() const noexcept { return iteration_; }
  /// Population level at which the failure happened, or -1 outside BSVGD.
  long level() const noexcept { return level_; }

 private:
  long iteration_;
  long level_;
};

enum class Color : char { Explorer = 'E', Optimizer = 'O', Spine = 'S' };

inline char to_char(Color c) { return static_cast<char>(c); }
Color color_from_char(char c);

/// Builds a position, rejecting empty or non-finite coordinate lists.
Position make_position(std::span<const double> coords);
Position make_position(std::initializer_list<double> coords);

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  return x.allFinite();
}

struct Particle {
  Position position;
  Color color;
};

/// Ordered population of colored particles sharing one dimension.
///
/// Order is significant: branching appends offspring after their parents and
/// every operation preserves indices. Clouds are values; operations that
/// change a cloud return a new one.
class ParticleCloud {
 public:
  ParticleCloud(Positions positions, std::vector<Color> colors);
  /// All particles colored Explorer.
  explicit ParticleCloud(Positions positions);
  explicit ParticleCloud(const std::vector<Particle>& particles);

  Eigen::Index size() const noexcept { return positions_.cols(); }
  Eigen::Index dimension() const noexcept { return positions_.rows(); }

  const Positions& positions() const noexcept { return positions_; }
  const std::vector<Color>& colors() const noexcept { return colors_; }

  Particle particle(Eigen::Index i) const;
  Color color(Eigen::Index i) const { return colors_.at(static_cast<std::size_t>(i)); }

  std::size_t count(Color c) const;
  /// True when exactly one particle is colored Spine.
  bool is_branching_state() const { return count(Color::Spine) == 1; }

  /// Same colors, new positions of identical shape.
  ParticleCloud with_positions(Positions positions) const;

  friend bool operator==(const ParticleCloud& a, const ParticleCloud& b) {
    return a.colors_ == b.colors_ && a.positions_.rows() == b.positions_.rows() &&
           a.positions_.cols() == b.positions_.cols() && a.positions_ == b.positions_;
  }

 private:
  Positions positions_;
  std::vector<Color> colors_;
};

Position empirical_mean(const Positions& positions);
Position empirical_mean(const ParticleCloud& cloud);

ParticleCloud clone_with_color(const ParticleCloud& cloud, Eigen::Index index, Color new_color);

}  // namespace bsvgd
