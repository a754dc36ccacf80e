#include <cmath>

#include "manifold_langevin/data_forge.hpp"
#include "manifold_langevin/errors.hpp"
#include "manifold_langevin/models.hpp"

namespace manifold_langevin {

namespace {

double softplus(double eta) {
  return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

}  // namespace

LogisticModel::LogisticModel(Observations obs, double alpha)
    : TargetModel(std::move(obs), Prior::gaussian(alpha)) {
  const Matrix& v = observations().values;
  if (v.cols() < 2) {
    throw InputError("logistic: need at least one feature column and a response column");
  }
  require_columns(v.cols(), "logistic");
  const Eigen::Index n = v.rows();
  const Eigen::Index d = v.cols() - 1;
  design_.resize(n, d + 1);
  design_.col(0).setOnes();
  design_.rightCols(d) = v.leftCols(d);
  responses_ = v.col(d);
  if (((responses_.array() != 0.0) && (responses_.array() != 1.0)).any()) {
    throw InputError("logistic: responses must be 0 or 1");
  }
}

double LogisticModel::log_likelihood(const Vector& theta) const {
  const Vector eta = design_ * theta;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    acc += responses_(i) * eta(i) - softplus(eta(i));
  }
  return acc;
}

Vector LogisticModel::likelihood_gradient(const Vector& theta) const {
  const Vector eta = design_ * theta;
  const Vector resid = responses_ - eta.unaryExpr(&logistic);
  return design_.transpose() * resid;
}

FisherGeometry LogisticModel::likelihood_fisher(const Vector& theta,
                                                std::uint64_t) const {
  const Eigen::Index dim = design_.cols();
  const Vector p = (design_ * theta).unaryExpr(&logistic);
  const Eigen::ArrayXd w = p.array() * (1.0 - p.array());
  const Eigen::ArrayXd w3 = w * (1.0 - 2.0 * p.array());

  FisherGeometry f;
  f.metric = design_.transpose() * (w.matrix().asDiagonal() * design_);
  f.partials.reserve(static_cast<std::size_t>(dim));
  for (Eigen::Index r = 0; r < dim; ++r) {
    const Vector weights = (w3 * design_.col(r).array()).matrix();
    f.partials.push_back(design_.transpose() * (weights.asDiagonal() * design_));
  }
  return f;
}

Vector LogisticModel::sample_observation_score(const Vector& theta,
                                               CounterRng& rng) const {
  const Eigen::Index n = design_.rows();
  auto i = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(n));
  if (i >= n) i = n - 1;
  const auto x = design_.row(i);
  const double p = logistic(x.dot(theta));
  const double t = rng.uniform() < p ? 1.0 : 0.0;
  return (t - p) * x.transpose();
}

}  // namespace manifold_langevin
