#include "bsvgd/rng.hpp"

#include "bsvgd/core.hpp"

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace bsvgd {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double SeededRng::uniform01() { return boost::random::uniform_01<double>{}(engine_); }

double SeededRng::normal() { return boost::random::normal_distribution<double>{0.0, 1.0}(engine_); }

Eigen::VectorXd SeededRng::normal_vector(Eigen::Index dimension) {
  Eigen::VectorXd z(dimension);
  for (Eigen::Index k = 0; k < dimension; ++k) z(k) = normal();
  return z;
}

double SeededRng::gamma(double shape) {
  if (!(shape > 0.0)) throw InvalidArgument("gamma shape must be positive");
  return boost::random::gamma_distribution<double>{shape, 1.0}(engine_);
}

std::size_t SeededRng::uniform_index(std::size_t n) {
  if (n == 0) throw InvalidArgument("uniform_index needs a nonempty range");
  return boost::random::uniform_int_distribution<std::size_t>{0, n - 1}(engine_);
}

SeededRng SeededRng::derive(std::uint64_t stream_id) const {
  return SeededRng(splitmix64(splitmix64(seed_) ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL)));
}

}  // namespace bsvgd
