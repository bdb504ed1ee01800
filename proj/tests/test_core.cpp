#include "bsvgd/core.hpp"
#include "bsvgd/rng.hpp"
#include "bsvgd/snapshot_io.hpp"

#include <doctest.h>

#include <limits>
#include <sstream>

using namespace bsvgd;

namespace {
Positions cols(std::initializer_list<std::initializer_list<double>> pts) {
  Positions x(static_cast<Eigen::Index>(pts.begin()->size()), static_cast<Eigen::Index>(pts.size()));
  Eigen::Index j = 0;
  for (const auto& p : pts) x.col(j++) = make_position(p);
  return x;
}
}  // namespace

TEST_CASE("make_position rejects empty and non-finite input") {
  CHECK(make_position({1.0, 2.0}).size() == 2);
  CHECK_THROWS_AS(make_position(std::span<const double>()), InvalidArgument);
  CHECK_THROWS_AS(make_position({1.0, std::numeric_limits<double>::quiet_NaN()}), InvalidArgument);
  CHECK_THROWS_AS(make_position({std::numeric_limits<double>::infinity()}), InvalidArgument);
}

TEST_CASE("colors round-trip through their characters") {
  for (Color c : {Color::Explorer, Color::Optimizer, Color::Spine}) CHECK(color_from_char(to_char(c)) == c);
  CHECK_THROWS_AS(color_from_char('X'), InvalidArgument);
}

TEST_CASE("cloud construction validates shape and values") {
  CHECK_THROWS_AS(ParticleCloud(Positions(2, 0)), InvalidArgument);
  CHECK_THROWS_AS(ParticleCloud(Positions(0, 3)), InvalidArgument);
  CHECK_THROWS_AS(ParticleCloud(cols({{0, 0}, {1, 1}}), {Color::Spine}), InvalidArgument);
  Positions bad = cols({{0, 0}});
  bad(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ParticleCloud{bad}, InvalidArgument);

  const ParticleCloud c(cols({{0, 0}, {1, 1}, {2, 2}}), {Color::Spine, Color::Explorer, Color::Optimizer});
  CHECK(c.size() == 3);
  CHECK(c.dimension() == 2);
  CHECK(c.count(Color::Explorer) == 1);
  CHECK(c.is_branching_state());
  CHECK(c.particle(2).color == Color::Optimizer);
  CHECK(c.particle(1).position == make_position({1, 1}));
  CHECK(ParticleCloud(cols({{3, 4}})).color(0) == Color::Explorer);
}

TEST_CASE("cloud from particle list checks dimensions") {
  std::vector<Particle> ps{{make_position({0, 1}), Color::Spine}, {make_position({2, 3}), Color::Optimizer}};
  const ParticleCloud c(ps);
  CHECK(c.positions()(1, 1) == 3.0);
  ps.push_back({make_position({1}), Color::Explorer});
  CHECK_THROWS_AS(ParticleCloud{ps}, InvalidArgument);
  CHECK_THROWS_AS(ParticleCloud{std::vector<Particle>{}}, InvalidArgument);
}

TEST_CASE("empirical mean") {
  CHECK(empirical_mean(ParticleCloud(cols({{0, 0}}))) == make_position({0, 0}));
  CHECK(empirical_mean(ParticleCloud(cols({{1, 0}, {-1, 0}}))) == make_position({0, 0}));
  CHECK(empirical_mean(ParticleCloud(cols({{1, 2}, {3, 4}, {5, 0}}))).isApprox(make_position({3, 2}), 1e-15));
  CHECK_THROWS_AS(empirical_mean(Positions(2, 0)), InvalidArgument);
}

TEST_CASE("clone_with_color") {
  const ParticleCloud a(cols({{0, 0}}), {Color::Explorer});
  CHECK(clone_with_color(a, 0, Color::Spine).colors() == std::vector<Color>{Color::Spine});

  const ParticleCloud b(cols({{0, 0}, {1, 1}}), {Color::Spine, Color::Explorer});
  const ParticleCloud b2 = clone_with_color(b, 1, Color::Optimizer);
  CHECK(b2.colors() == std::vector<Color>{Color::Spine, Color::Optimizer});
  CHECK(b2.positions() == b.positions());
  CHECK(clone_with_color(b2, 1, Color::Explorer) == b);
  CHECK_THROWS_AS(clone_with_color(b, 2, Color::Spine), InvalidArgument);
  CHECK_THROWS_AS(clone_with_color(b, -1, Color::Spine), InvalidArgument);
}

TEST_CASE("seeded streams are reproducible and distinct") {
  SeededRng a(42), b(42), c(43);
  for (int i = 0; i < 5; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    CHECK(va != c.next_u64());
  }
  SeededRng d1 = SeededRng(42).derive(1), d1b = SeededRng(42).derive(1), d2 = SeededRng(42).derive(2);
  CHECK(d1.seed() == d1b.seed());
  CHECK(d1.seed() != d2.seed());
  CHECK(d1.normal() == d1b.normal());
  // known splitmix64 value for input 0 (reference implementation by Vigna)
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("rng draws have the right moments") {
  SeededRng r(5);
  double s = 0, s2 = 0, u = 0, g = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    u += r.uniform01();
    g += r.gamma(3.5);
  }
  CHECK(std::abs(s / n) < 0.03);
  CHECK(std::abs(s2 / n - 1.0) < 0.03);
  CHECK(std::abs(u / n - 0.5) < 0.01);
  CHECK(std::abs(g / n - 3.5) < 0.05);
  for (int i = 0; i < 1000; ++i) CHECK(r.uniform_index(7) < 7);
}

TEST_CASE("double formatting is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(5.0) == "5");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  SeededRng r(9);
  for (int i = 0; i < 1000; ++i) {
    const double v = r.normal() * std::pow(10.0, static_cast<double>(r.uniform_index(40)) - 20);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK_THROWS_AS(parse_double("1.0x"), InvalidArgument);
  CHECK_THROWS_AS(parse_double(""), InvalidArgument);
  CHECK_THROWS_AS(parse_double("nan"), InvalidArgument);
}

TEST_CASE("snapshot csv round-trips exactly") {
  SeededRng r(3);
  Positions x(3, 17);
  for (Eigen::Index j = 0; j < x.cols(); ++j) x.col(j) = r.normal_vector(3) * 1e3;
  std::vector<Color> colors(17, Color::Optimizer);
  colors[4] = Color::Spine;
  colors[9] = Color::Explorer;
  const ParticleCloud c(x, colors);
  std::stringstream buf;
  write_snapshot_csv(buf, c);
  CHECK(buf.str().rfind("x0,x1,x2,color\n", 0) == 0);
  std::stringstream in(buf.str());
  CHECK(read_snapshot_csv(in) == c);
}

TEST_CASE("snapshot reader reports the offending line") {
  std::stringstream bad_header("a,b,color\n1,2,E\n");
  CHECK_THROWS_AS(read_snapshot_csv(bad_header), InvalidArgument);
  std::stringstream bad_row("x0,x1,color\n1,2,E\n1,zz,E\n");
  try {
    read_snapshot_csv(bad_row);
    FAIL("expected error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  std::stringstream short_row("x0,x1,color\n1,E\n");
  CHECK_THROWS_AS(read_snapshot_csv(short_row), InvalidArgument);
  std::stringstream bad_color("x0,color\n1,Q\n");
  CHECK_THROWS_AS(read_snapshot_csv(bad_color), InvalidArgument);
  std::stringstream empty("x0,color\n");
  CHECK_THROWS_AS(read_snapshot_csv(empty), InvalidArgument);
}
