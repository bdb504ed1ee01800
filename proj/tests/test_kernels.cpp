#include "bsvgd/kernels.hpp"
#include "bsvgd/rng.hpp"

#include <doctest.h>

#include <cstdlib>
#include <numbers>

using namespace bsvgd;

namespace oracle {
constexpr double kKernelD2R1Dist1 = 0.11709966304863832138;
constexpr double kGradD2R1At10 = -0.23419932609727664276;
}  // namespace oracle

TEST_CASE("kernel values") {
  const GaussianKernel k(1.0, 2);
  const Position o = make_position({0, 0}), e1 = make_position({1, 0});
  CHECK(k.eval(o, o) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-15));
  CHECK(k.prefactor() == doctest::Approx(0.31830988618).epsilon(1e-10));
  CHECK(kernel_eval(k, o, e1) == doctest::Approx(oracle::kKernelD2R1Dist1).epsilon(1e-15));
  SeededRng r(1);
  for (int i = 0; i < 20; ++i) {
    const Position x = r.normal_vector(2), y = r.normal_vector(2);
    CHECK(k.eval(x, y) == k.eval(y, x));
  }
  const GaussianKernel k3(2.0, 3);
  CHECK(k3.prefactor() == doctest::Approx(std::pow(std::numbers::pi, -1.5)));
}

TEST_CASE("kernel gradient") {
  const GaussianKernel k(1.0, 2);
  const Position x = make_position({1, 0}), o = make_position({0, 0});
  CHECK(k.grad_first(o, o).norm() == 0.0);
  const Position g = kernel_grad_first(k, x, o);
  CHECK(g(0) == doctest::Approx(oracle::kGradD2R1At10).epsilon(1e-15));
  CHECK(g(1) == 0.0);

  // against central differences in the first argument
  const GaussianKernel kr(1.7, 3);
  SeededRng r(2);
  for (int i = 0; i < 20; ++i) {
    const Position a = r.normal_vector(3), b = r.normal_vector(3);
    Position fd(3);
    for (int c = 0; c < 3; ++c) {
      Position up = a, dn = a;
      up(c) += 1e-6;
      dn(c) -= 1e-6;
      fd(c) = (kr.eval(up, b) - kr.eval(dn, b)) / 2e-6;
    }
    CHECK((kr.grad_first(a, b) - fd).norm() < 1e-8);
  }
}

TEST_CASE("kernel validation") {
  CHECK_THROWS_AS(GaussianKernel(0.0, 2), InvalidArgument);
  CHECK_THROWS_AS(GaussianKernel(1.0, 0), InvalidArgument);
  const GaussianKernel k(1.0, 2);
  CHECK_THROWS_AS(k.eval(make_position({1, 2, 3}), make_position({1, 2})), InvalidArgument);
  CHECK_THROWS_AS(k.grad_first(make_position({1, 2, 3}), make_position({1, 2, 3})), InvalidArgument);
}

TEST_CASE("gram matrix and stein directions match pairwise evaluation") {
  const GaussianKernel k(1.3, 2);
  SeededRng r(3);
  Positions x(2, 9), s(2, 9);
  for (Eigen::Index j = 0; j < 9; ++j) {
    x.col(j) = r.normal_vector(2);
    s.col(j) = r.normal_vector(2);
  }
  const Eigen::MatrixXd gram = k.gram(x, 1);
  for (Eigen::Index i = 0; i < 9; ++i)
    for (Eigen::Index j = 0; j < 9; ++j) CHECK(gram(i, j) == doctest::Approx(k.eval(x.col(i), x.col(j))).epsilon(1e-15));

  const Positions fast = k.stein_directions(x, s, 1);
  const Positions generic = k.SmoothKernel::stein_directions(x, s, 1);
  CHECK((fast - generic).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(k.stein_directions(x, s, 4) == fast);
}

TEST_CASE("thread resolution") {
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("BSVGD_THREADS caps the default thread count") {
  ::setenv("BSVGD_THREADS", "2", 1);
  CHECK(resolve_threads(0) == 2);
  CHECK(resolve_threads(5) == 2);
  CHECK(resolve_threads(1) == 1);
  ::setenv("BSVGD_THREADS", "junk", 1);
  CHECK(resolve_threads(0) >= 1);
  ::unsetenv("BSVGD_THREADS");
}
