#pragma once

#include "bsvgd/core.hpp"

#include <memory>
#include <string>
#include <vector>

namespace bsvgd {

/// Target distribution known through its unnormalized log-density and score.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual double log_density(const Eigen::Ref<const Position>& x) const = 0;
  /// Gradient of log_density at x.
  virtual Position score(const Eigen::Ref<const Position>& x) const = 0;

  /// Column-wise scores of a position matrix.
  virtual Positions scores(const Positions& xs) const;
};

/// Isotropic Gaussian mixture sum_k w_k N(mu_k, variance * I).
class GaussianMixture final : public ScoreModel {
 public:
  /// Weights summing to within 1e-9 of one are renormalized; anything else throws.
  GaussianMixture(std::vector<Position> means, double variance, std::vector<double> weights);

  Eigen::Index dimension() const override { return means_.rows(); }
  double log_density(const Eigen::Ref<const Position>& x) const override;
  Position score(const Eigen::Ref<const Position>& x) const override;

  /// Means column-wise, d x K.
  const Positions& means() const noexcept { return means_; }
  double variance() const noexcept { return variance_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  Eigen::Index components() const noexcept { return means_.cols(); }

 private:
  /// log w_k + log N(x; mu_k, variance I) for every k.
  Eigen::VectorXd component_log_terms(const Eigen::Ref<const Position>& x) const;

  Positions means_;
  double variance_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd log_weights_;
};

/// Shear map (x1, x2 + b x1^2 - 100 b, x3, ...). Unit Jacobian determinant.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> banana_forward(const Eigen::MatrixBase<Derived>& x,
                                                                          typename Derived::Scalar b) {
  if (x.size() < 2) throw InvalidArgument("banana map requires d >= 2");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> y = x;
  y(1) += b * x(0) * x(0) - 100 * b;
  return y;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> banana_inverse(const Eigen::MatrixBase<Derived>& x,
                                                                          typename Derived::Scalar b) {
  if (x.size() < 2) throw InvalidArgument("banana map requires d >= 2");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> z = x;
  z(1) -= b * x(0) * x(0) - 100 * b;
  return z;
}

struct BananaComponent {
  Position location;
  /// Degrees of freedom r of the underlying multivariate t.
  double dof;
  /// Nonlinearity b of the shear.
  double nonlinearity;
};

/// Mixture of multivariate t densities, scale diag(100, 1, ..., 1), each pushed
/// through its own shear map.
class BananaTMixture final : public ScoreModel {
 public:
  BananaTMixture(std::vector<BananaComponent> components, std::vector<double> weights);

  Eigen::Index dimension() const override { return dimension_; }
  double log_density(const Eigen::Ref<const Position>& x) const override;
  Position score(const Eigen::Ref<const Position>& x) const override;

  const std::vector<BananaComponent>& components() const noexcept { return components_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }

  /// Diagonal of the shared scale matrix.
  Eigen::VectorXd scale_diagonal() const;

 private:
  Eigen::Index dimension_;
  std::vector<BananaComponent> components_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd log_weights_;
  Eigen::VectorXd log_normalizers_;
  Eigen::VectorXd inv_scale_;
};

/// Log-density of a multivariate t with location, diagonal scale and r degrees of freedom.
double t_log_density(const Eigen::Ref<const Position>& z, const Eigen::Ref<const Position>& location,
                     const Eigen::Ref<const Eigen::VectorXd>& scale_diagonal, double dof);

/// Central differences of an arbitrary log-density callable.
template <typename LogDensity>
Position finite_difference_gradient(LogDensity&& log_density, const Eigen::Ref<const Position>& x, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  Position grad(x.size());
  Position probe = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    probe(k) = x(k) + h;
    const double up = log_density(probe);
    probe(k) = x(k) - h;
    const double down = log_density(probe);
    probe(k) = x(k);
    grad(k) = (up - down) / (2.0 * h);
  }
  return grad;
}

Position finite_difference_score_oracle(const ScoreModel& model, const Eigen::Ref<const Position>& x, double h);

/// 25 components on {0,2,4,6,8}^2, weights k/325 in lexicographic order, covariance variance * I.
GaussianMixture paper_gauss25(double variance = 5.0);

/// Three banana t components at (0,0), (0,5), (15,15) with b = 0.03, 0.05, 0.03 and weights 0.4, 0.4, 0.2.
/// The degrees of freedom are not published; 7 is this library's default.
BananaTMixture paper_banana3(double dof = 7.0);

}  // namespace bsvgd
