#pragma once

#include "bsvgd/core.hpp"

#include <cmath>
#include <numbers>

namespace bsvgd {

/// Symmetric positive kernel K(x, y) with its gradient in the first argument.
class SmoothKernel {
 public:
  virtual ~SmoothKernel() = default;

  virtual double eval(const Eigen::Ref<const Position>& x, const Eigen::Ref<const Position>& y) const = 0;
  virtual Position grad_first(const Eigen::Ref<const Position>& x, const Eigen::Ref<const Position>& y) const = 0;

  /// Stein directions for every particle:
  ///   column i = (1/l) sum_j [ K(x_j, x_i) s_j + grad_1 K(x_j, x_i) ]
  /// where s_j is column j of `scores`. Each column is computed by one thread,
  /// so the result does not depend on `threads`.
  virtual Positions stein_directions(const Positions& positions, const Positions& scores, int threads = 0) const;
};

/// pi^{-d/2} exp(-|x - y|^2 / r)
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar gaussian_kernel_value(const Eigen::MatrixBase<DerivedX>& x,
                                                const Eigen::MatrixBase<DerivedY>& y,
                                                typename DerivedX::Scalar bandwidth) {
  using std::exp;
  using std::pow;
  using Scalar = typename DerivedX::Scalar;
  const Scalar prefactor = pow(Scalar(std::numbers::pi), -Scalar(x.size()) / 2);
  return prefactor * exp(-(x - y).squaredNorm() / bandwidth);
}

/// -(2/r) (x - y) K_r(x, y)
template <typename DerivedX, typename DerivedY>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> gaussian_kernel_grad_first(
    const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y, typename DerivedX::Scalar bandwidth) {
  using Scalar = typename DerivedX::Scalar;
  return (Scalar(-2) / bandwidth * gaussian_kernel_value(x, y, bandwidth)) * (x - y);
}

/// K_r(x, y) = pi^{-d/2} exp(-(x-y)^T (x-y) / r).
class GaussianKernel final : public SmoothKernel {
 public:
  GaussianKernel(double bandwidth, Eigen::Index dimension);

  double bandwidth() const noexcept { return bandwidth_; }
  Eigen::Index dimension() const noexcept { return dimension_; }
  double prefactor() const noexcept { return prefactor_; }

  double eval(const Eigen::Ref<const Position>& x, const Eigen::Ref<const Position>& y) const override;
  Position grad_first(const Eigen::Ref<const Position>& x, const Eigen::Ref<const Position>& y) const override;

  /// Symmetric l x l matrix of kernel values.
  Eigen::MatrixXd gram(const Positions& positions, int threads = 0) const;

  Positions stein_directions(const Positions& positions, const Positions& scores, int threads = 0) const override;

 private:
  void check(const Eigen::Ref<const Position>& x, const Eigen::Ref<const Position>& y) const;

  double bandwidth_;
  Eigen::Index dimension_;
  double prefactor_;
};

inline double kernel_eval(const SmoothKernel& k, const Eigen::Ref<const Position>& x,
                          const Eigen::Ref<const Position>& y) {
  return k.eval(x, y);
}

inline Position kernel_grad_first(const SmoothKernel& k, const Eigen::Ref<const Position>& x,
                                  const Eigen::Ref<const Position>& y) {
  return k.grad_first(x, y);
}

/// Number of worker threads to use: `requested` if positive, otherwise the
/// BSVGD_THREADS environment variable, otherwise the OpenMP default.
int resolve_threads(int requested);

}  // namespace bsvgd
