#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "manifold_langevin/errors.hpp"
#include "manifold_langevin/models.hpp"

namespace manifold_langevin {

// ---------------------------------------------------------------- index

GaussianParamIndex::GaussianParamIndex(Eigen::Index data_dim) : d_(data_dim) {
  if (data_dim < 1) {
    throw InputError("gaussian: data dimension must be positive");
  }
  for (Eigen::Index p = 0; p < d_; ++p) {
    for (Eigen::Index q = 0; q <= p; ++q) pairs_.emplace_back(p, q);
  }
}

std::pair<Eigen::Index, Eigen::Index> GaussianParamIndex::covariance_pair(
    Eigen::Index i) const {
  if (i < d_ || i >= size()) {
    throw DimensionError("gaussian index " + std::to_string(i) +
                         " is not a covariance coordinate");
  }
  return pairs_[static_cast<std::size_t>(i - d_)];
}

Eigen::Index GaussianParamIndex::covariance_index(Eigen::Index p, Eigen::Index q) const {
  if (p < q) std::swap(p, q);
  if (q < 0 || p >= d_) {
    throw DimensionError("gaussian covariance entry out of range");
  }
  return d_ + p * (p + 1) / 2 + q;
}

Vector GaussianParamIndex::to_theta(const Vector& mean, const Matrix& covariance) const {
  if (mean.size() != d_ || covariance.rows() != d_ || covariance.cols() != d_) {
    throw DimensionError("gaussian: mean/covariance do not match the data dimension");
  }
  Vector theta(size());
  theta.head(d_) = mean;
  for (Eigen::Index i = d_; i < size(); ++i) {
    const auto [p, q] = covariance_pair(i);
    theta(i) = p == q ? covariance(p, p) : covariance(p, q) + covariance(q, p);
  }
  return theta;
}

Vector GaussianParamIndex::mean(const Vector& theta) const { return theta.head(d_); }

Matrix GaussianParamIndex::covariance(const Vector& theta) const {
  if (theta.size() != size()) {
    throw DimensionError("gaussian: parameter vector has the wrong length");
  }
  Matrix sigma(d_, d_);
  for (Eigen::Index i = d_; i < size(); ++i) {
    const auto [p, q] = covariance_pair(i);
    if (p == q) {
      sigma(p, p) = theta(i);
    } else {
      sigma(p, q) = sigma(q, p) = 0.5 * theta(i);
    }
  }
  return sigma;
}

Eigen::Index GaussianParamIndex::data_dim_for(Eigen::Index parameter_count) {
  for (Eigen::Index d = 1; (d * d + 3 * d) / 2 <= parameter_count; ++d) {
    if ((d * d + 3 * d) / 2 == parameter_count) return d;
  }
  throw InputError("gaussian: " + std::to_string(parameter_count) +
                   " is not a valid parameter count (d^2 + 3d)/2");
}

// ---------------------------------------------------------------- model

namespace {

Matrix spd_inverse(const Matrix& sigma) {
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw DomainError("gaussian: covariance is not positive definite");
  }
  return llt.solve(Matrix::Identity(sigma.rows(), sigma.cols()));
}

}  // namespace

GaussianModel::GaussianModel(Observations obs, std::optional<Prior> prior)
    : GaussianModel(GaussianParamIndex(std::max<Eigen::Index>(obs.values.cols(), 1)),
                    std::move(obs), std::move(prior)) {}

GaussianModel::GaussianModel(GaussianParamIndex index, Observations&& obs,
                             std::optional<Prior> prior)
    : TargetModel(std::move(obs),
                  prior ? std::move(*prior)
                        : default_prior(ModelKind::gaussian, index.size())),
      index_(std::move(index)) {
  require_columns(index_.data_dim(), "gaussian");
  const Matrix& y = observations().values;
  sum_ = y.colwise().sum().transpose();
  sum_outer_ = y.transpose() * y;
}

bool GaussianModel::model_support(const Vector& theta) const {
  const Matrix sigma = index_.covariance(theta);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma, Eigen::EigenvaluesOnly);
  return eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() >= kSpdFloor;
}

Matrix GaussianModel::scatter(const Vector& mu) const {
  const double n = static_cast<double>(observation_count());
  return sum_outer_ - mu * sum_.transpose() - sum_ * mu.transpose() +
         n * mu * mu.transpose();
}

double GaussianModel::log_likelihood(const Vector& theta) const {
  const Eigen::Index d = index_.data_dim();
  const double n = static_cast<double>(observation_count());
  const Vector mu = index_.mean(theta);
  Eigen::LLT<Matrix> llt(index_.covariance(theta));
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const Matrix r = scatter(mu);
  const double quad = llt.solve(r).trace();
  return -0.5 * n * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det) -
         0.5 * quad;
}

Vector GaussianModel::likelihood_gradient(const Vector& theta) const {
  const Eigen::Index d = index_.data_dim();
  const double n = static_cast<double>(observation_count());
  const Vector mu = index_.mean(theta);
  const Matrix s = spd_inverse(index_.covariance(theta));
  const Matrix m = 0.5 * (-n * s + s * scatter(mu) * s);
  Vector g(index_.size());
  g.head(d) = s * (sum_ - n * mu);
  for (Eigen::Index i = d; i < index_.size(); ++i) {
    const auto [p, q] = index_.covariance_pair(i);
    g(i) = m(p, q);
  }
  return g;
}

FisherGeometry GaussianModel::likelihood_fisher(const Vector& theta,
                                                std::uint64_t) const {
  const Eigen::Index d = index_.data_dim();
  const Eigen::Index dim = index_.size();
  const Eigen::Index c = dim - d;
  const double n = static_cast<double>(observation_count());
  const Matrix s = spd_inverse(index_.covariance(theta));

  // lower(i, j) = 1/4 (S_{p_i p_j} S_{q_i q_j} + S_{p_i q_j} S_{p_j q_i})
  auto lower_block = [&](const Matrix& a, const Matrix& b) {
    Matrix out(c, c);
    for (Eigen::Index i = 0; i < c; ++i) {
      const auto [pi, qi] = index_.covariance_pair(d + i);
      for (Eigen::Index j = 0; j < c; ++j) {
        const auto [pj, qj] = index_.covariance_pair(d + j);
        out(i, j) = 0.25 * (a(pi, pj) * b(qi, qj) + a(pi, qj) * b(pj, qi));
      }
    }
    return out;
  };

  FisherGeometry f;
  f.metric = Matrix::Zero(dim, dim);
  f.metric.topLeftCorner(d, d) = n * s;
  f.metric.bottomRightCorner(c, c) = n * lower_block(s, s);

  f.partials.assign(static_cast<std::size_t>(dim), Matrix::Zero(dim, dim));
  for (Eigen::Index r = d; r < dim; ++r) {
    const auto [a, b] = index_.covariance_pair(r);
    // d Sigma / d theta_r is E_aa or (E_ab + E_ba)/2; dS = -S (d Sigma) S.
    Matrix ds;
    if (a == b) {
      ds = -s.col(a) * s.row(a);
    } else {
      ds = -0.5 * (s.col(a) * s.row(b) + s.col(b) * s.row(a));
    }
    Matrix& part = f.partials[static_cast<std::size_t>(r)];
    part.topLeftCorner(d, d) = n * ds;
    part.bottomRightCorner(c, c) = n * (lower_block(ds, s) + lower_block(s, ds));
  }
  return f;
}

Vector GaussianModel::sample_observation_score(const Vector& theta,
                                               CounterRng& rng) const {
  const Eigen::Index d = index_.data_dim();
  const Matrix sigma = index_.covariance(theta);
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw DomainError("gaussian: covariance is not positive definite");
  }
  Vector z(d);
  for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.normal();
  const Vector r = llt.matrixL() * z;
  const Matrix s = spd_inverse(sigma);
  const Vector sr = s * r;
  const Matrix m = 0.5 * (-s + sr * sr.transpose());
  Vector score(index_.size());
  score.head(d) = sr;
  for (Eigen::Index i = d; i < index_.size(); ++i) {
    const auto [p, q] = index_.covariance_pair(i);
    score(i) = m(p, q);
  }
  return score;
}

}  // namespace manifold_langevin
