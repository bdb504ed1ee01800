#include "bsvgd/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bsvgd {

int resolve_threads(int requested) {
  int cap = 0;
  if (const char* env = std::getenv("BSVGD_THREADS")) {
    try {
      cap = std::max(0, std::stoi(env));
    } catch (const std::exception&) {
    }
  }
  if (requested > 0) return cap > 0 ? std::min(requested, cap) : requested;
  if (cap > 0) return cap;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Positions SmoothKernel::stein_directions(const Positions& positions, const Positions& scores, int threads) const {
  const Eigen::Index n = positions.cols();
  Positions out(positions.rows(), n);
  const int nthreads = resolve_threads(threads);
  (void)nthreads;
#pragma omp parallel for num_threads(nthreads) schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    Position acc = Position::Zero(positions.rows());
    for (Eigen::Index j = 0; j < n; ++j) {
      acc += eval(positions.col(j), positions.col(i)) * scores.col(j) + grad_first(positions.col(j), positions.col(i));
    }
    out.col(i) = acc / static_cast<double>(n);
  }
  return out;
}

GaussianKernel::GaussianKernel(double bandwidth, Eigen::Index dimension)
    : bandwidth_(bandwidth), dimension_(dimension) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw InvalidArgument("kernel bandwidth must be positive");
  if (dimension < 1) throw InvalidArgument("kernel dimension must be at least 1");
  prefactor_ = std::pow(std::numbers::pi, -0.5 * static_cast<double>(dimension));
}

void GaussianKernel::check(const Eigen::Ref<const Position>& x, const Eigen::Ref<const Position>& y) const {
  if (x.size() != dimension_ || y.size() != dimension_)
    throw InvalidArgument("kernel dimension mismatch: expected " + std::to_string(dimension_) + ", got " +
                          std::to_string(x.size()) + " and " + std::to_string(y.size()));
}

double GaussianKernel::eval(const Eigen::Ref<const Position>& x, const Eigen::Ref<const Position>& y) const {
  check(x, y);
  return prefactor_ * std::exp(-(x - y).squaredNorm() / bandwidth_);
}

Position GaussianKernel::grad_first(const Eigen::Ref<const Position>& x, const Eigen::Ref<const Position>& y) const {
  check(x, y);
  return (-2.0 / bandwidth_ * eval(x, y)) * (x - y);
}

Eigen::MatrixXd GaussianKernel::gram(const Positions& positions, int threads) const {
  if (positions.rows() != dimension_) throw InvalidArgument("kernel dimension mismatch");
  const Eigen::Index n = positions.cols();
  Eigen::MatrixXd k(n, n);
  const int nthreads = resolve_threads(threads);
  (void)nthreads;
#pragma omp parallel for num_threads(nthreads) schedule(dynamic, 16)
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = prefactor_;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = prefactor_ * std::exp(-(positions.col(i) - positions.col(j)).squaredNorm() / bandwidth_);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Positions GaussianKernel::stein_directions(const Positions& positions, const Positions& scores, int threads) const {
  if (scores.rows() != positions.rows() || scores.cols() != positions.cols())
    throw InvalidArgument("scores and positions differ in shape");
  const Eigen::MatrixXd k = gram(positions, threads);
  const Eigen::Index n = positions.cols();
  const double repulsion = 2.0 / bandwidth_;
  Positions out(positions.rows(), n);
  const int nthreads = resolve_threads(threads);
  (void)nthreads;
  const Eigen::Index d = positions.rows();
  // column i: (1/l) sum_j k_ji (s_j + (2/r)(x_i - x_j)), j ascending
#pragma omp parallel for num_threads(nthreads) schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    Position acc = Position::Zero(d);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = k(j, i);
      for (Eigen::Index c = 0; c < d; ++c)
        acc(c) += w * (scores(c, j) + repulsion * (positions(c, i) - positions(c, j)));
    }
    out.col(i) = acc / static_cast<double>(n);
  }
  return out;
}

}  // namespace bsvgd
