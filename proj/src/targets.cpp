#include "bsvgd/targets.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace bsvgd {

namespace {

Eigen::VectorXd checked_weights(const std::vector<double>& weights, std::size_t expected) {
  if (weights.size() != expected)
    throw InvalidArgument("mixture has " + std::to_string(expected) + " components but " +
                          std::to_string(weights.size()) + " weights");
  if (weights.empty()) throw InvalidArgument("mixture needs at least one component");
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  if (!w.allFinite() || (w.array() <= 0.0).any()) throw InvalidArgument("mixture weights must be positive");
  const double total = w.sum();
  if (std::abs(total - 1.0) > 1e-9)
    throw InvalidArgument("mixture weights sum to " + std::to_string(total) + ", expected 1");
  return w / total;
}

double log_sum_exp(const Eigen::VectorXd& a) {
  const double top = a.maxCoeff();
  return top + std::log((a.array() - top).exp().sum());
}

Eigen::VectorXd softmax(const Eigen::VectorXd& a) {
  Eigen::VectorXd e = (a.array() - a.maxCoeff()).exp();
  return e / e.sum();
}

}  // namespace

Positions ScoreModel::scores(const Positions& xs) const {
  Positions out(xs.rows(), xs.cols());
  for (Eigen::Index i = 0; i < xs.cols(); ++i) out.col(i) = score(xs.col(i));
  return out;
}

// ---------------------------------------------------------------------------

GaussianMixture::GaussianMixture(std::vector<Position> means, double variance, std::vector<double> weights)
    : variance_(variance) {
  if (means.empty()) throw InvalidArgument("mixture needs at least one component");
  if (!(variance > 0.0) || !std::isfinite(variance)) throw InvalidArgument("mixture variance must be positive");
  weights_ = checked_weights(weights, means.size());
  log_weights_ = weights_.array().log();
  const Eigen::Index d = means.front().size();
  if (d < 1) throw InvalidArgument("mixture dimension must be at least 1");
  means_.resize(d, static_cast<Eigen::Index>(means.size()));
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (means[k].size() != d) throw InvalidArgument("mixture means disagree on dimension");
    if (!means[k].allFinite()) throw InvalidArgument("mixture mean is not finite");
    means_.col(static_cast<Eigen::Index>(k)) = means[k];
  }
}

Eigen::VectorXd GaussianMixture::component_log_terms(const Eigen::Ref<const Position>& x) const {
  if (x.size() != dimension()) throw InvalidArgument("query dimension does not match the mixture");
  const Eigen::VectorXd sq = (means_.colwise() - x).colwise().squaredNorm().transpose();
  return log_weights_ - sq / (2.0 * variance_);
}

double GaussianMixture::log_density(const Eigen::Ref<const Position>& x) const {
  const double log_norm = -0.5 * static_cast<double>(dimension()) * std::log(2.0 * std::numbers::pi * variance_);
  return log_sum_exp(component_log_terms(x)) + log_norm;
}

Position GaussianMixture::score(const Eigen::Ref<const Position>& x) const {
  const Eigen::VectorXd resp = softmax(component_log_terms(x));
  return (means_ * resp - x) / variance_;
}

// ---------------------------------------------------------------------------

double t_log_density(const Eigen::Ref<const Position>& z, const Eigen::Ref<const Position>& location,
                     const Eigen::Ref<const Eigen::VectorXd>& scale_diagonal, double dof) {
  const double p = static_cast<double>(z.size());
  const double q = ((z - location).array().square() / scale_diagonal.array()).sum();
  const double log_norm = std::lgamma(0.5 * (dof + p)) - std::lgamma(0.5 * dof) -
                          0.5 * p * std::log(dof * std::numbers::pi) - 0.5 * scale_diagonal.array().log().sum();
  return log_norm - 0.5 * (dof + p) * std::log1p(q / dof);
}

BananaTMixture::BananaTMixture(std::vector<BananaComponent> components, std::vector<double> weights)
    : components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("mixture needs at least one component");
  weights_ = checked_weights(weights, components_.size());
  log_weights_ = weights_.array().log();
  dimension_ = components_.front().location.size();
  if (dimension_ < 2) throw InvalidArgument("banana map requires d >= 2");
  inv_scale_ = scale_diagonal().cwiseInverse();

  const double p = static_cast<double>(dimension_);
  log_normalizers_.resize(static_cast<Eigen::Index>(components_.size()));
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    if (c.location.size() != dimension_) throw InvalidArgument("banana locations disagree on dimension");
    if (!c.location.allFinite()) throw InvalidArgument("banana location is not finite");
    if (!(c.dof > 0.0) || !std::isfinite(c.dof)) throw InvalidArgument("degrees of freedom must be positive");
    if (!(c.nonlinearity > 0.0) || !std::isfinite(c.nonlinearity))
      throw InvalidArgument("banana nonlinearity b must be positive");
    // |Sigma|^{1/2} = 10
    log_normalizers_(static_cast<Eigen::Index>(k)) = std::lgamma(0.5 * (c.dof + p)) - std::lgamma(0.5 * c.dof) -
                                                     0.5 * p * std::log(c.dof * std::numbers::pi) - std::log(10.0);
  }
}

Eigen::VectorXd BananaTMixture::scale_diagonal() const {
  Eigen::VectorXd s = Eigen::VectorXd::Ones(dimension_);
  s(0) = 100.0;
  return s;
}

double BananaTMixture::log_density(const Eigen::Ref<const Position>& x) const {
  if (x.size() != dimension_) throw InvalidArgument("query dimension does not match the mixture");
  Eigen::VectorXd terms(static_cast<Eigen::Index>(components_.size()));
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    const Eigen::VectorXd u = banana_inverse(x, c.nonlinearity) - c.location;
    const double q = u.cwiseAbs2().dot(inv_scale_);
    const auto kk = static_cast<Eigen::Index>(k);
    terms(kk) = log_weights_(kk) + log_normalizers_(kk) - 0.5 * (c.dof + dimension_) * std::log1p(q / c.dof);
  }
  return log_sum_exp(terms);
}

Position BananaTMixture::score(const Eigen::Ref<const Position>& x) const {
  if (x.size() != dimension_) throw InvalidArgument("query dimension does not match the mixture");
  const auto K = static_cast<Eigen::Index>(components_.size());
  Eigen::VectorXd terms(K);
  Positions grads(dimension_, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto& c = components_[static_cast<std::size_t>(k)];
    const Eigen::VectorXd u = banana_inverse(x, c.nonlinearity) - c.location;
    const double q = u.cwiseAbs2().dot(inv_scale_);
    terms(k) = log_weights_(k) + log_normalizers_(k) - 0.5 * (c.dof + dimension_) * std::log1p(q / c.dof);
    // gradient in the pulled-back coordinates, then the transpose Jacobian of the inverse shear
    Eigen::VectorXd g = -(c.dof + dimension_) / (c.dof + q) * u.cwiseProduct(inv_scale_);
    g(0) += g(1) * (-2.0 * c.nonlinearity * x(0));
    grads.col(k) = g;
  }
  return grads * softmax(terms);
}

Position finite_difference_score_oracle(const ScoreModel& model, const Eigen::Ref<const Position>& x, double h) {
  return finite_difference_gradient([&](const Position& p) { return model.log_density(p); }, x, h);
}

GaussianMixture paper_gauss25(double variance) {
  std::vector<Position> means;
  std::vector<double> weights;
  int k = 1;
  for (int a = 0; a <= 8; a += 2) {
    for (int b = 0; b <= 8; b += 2) {
      means.push_back(make_position({double(a), double(b)}));
      weights.push_back(k++ / 325.0);
    }
  }
  return GaussianMixture(std::move(means), variance, std::move(weights));
}

BananaTMixture paper_banana3(double dof) {
  return BananaTMixture({{make_position({0.0, 0.0}), dof, 0.03},
                         {make_position({0.0, 5.0}), dof, 0.05},
                         {make_position({15.0, 15.0}), dof, 0.03}},
                        {0.4, 0.4, 0.2});
}

}  // namespace bsvgd
