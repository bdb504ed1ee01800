#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>

namespace bsvgd {

/// Reproducible random stream.
///
/// Engine: std::mt19937_64 (output sequence fixed by the C++ standard).
/// Distributions come from Boost.Random, whose algorithms are fixed in source,
/// so a seed determines the same draws on every platform. std::*_distribution
/// is avoided because its algorithms are implementation-defined.
class SeededRng {
 public:
  using engine_type = std::mt19937_64;

  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  engine_type& engine() noexcept { return engine_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform01();
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index dimension);
  /// Gamma(shape, 1).
  double gamma(double shape);
  /// Uniform on {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Independent stream keyed by (seed, stream_id); does not advance this stream.
  SeededRng derive(std::uint64_t stream_id) const;

 private:
  std::uint64_t seed_;
  engine_type engine_;
};

/// SplitMix64 finalizer, used to decorrelate derived seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace bsvgd
