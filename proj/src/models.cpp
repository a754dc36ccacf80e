#include "manifold_langevin/models.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "manifold_langevin/errors.hpp"

namespace manifold_langevin {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::rayleigh: return "rayleigh";
    case ModelKind::banana: return "banana";
    case ModelKind::weibull: return "weibull";
    case ModelKind::gaussian: return "gaussian";
    case ModelKind::logistic: return "logistic";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "rayleigh") return ModelKind::rayleigh;
  if (name == "banana") return ModelKind::banana;
  if (name == "weibull") return ModelKind::weibull;
  if (name == "gaussian") return ModelKind::gaussian;
  if (name == "logistic" || name == "logreg") return ModelKind::logistic;
  throw InputError("unknown model kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- Prior

Prior Prior::uniform(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) {
    throw DimensionError("uniform prior: bound vectors differ in length");
  }
  if (!lower.allFinite() || !upper.allFinite() ||
      (lower.array() >= upper.array()).any()) {
    throw InputError("uniform prior: bounds must be finite with lower < upper");
  }
  Prior p;
  p.kind = Kind::uniform;
  p.lower = std::move(lower);
  p.upper = std::move(upper);
  return p;
}

Prior Prior::gaussian(double variance_scale) {
  if (!(variance_scale > 0.0) || !std::isfinite(variance_scale)) {
    throw InputError("gaussian prior: variance scale must be positive");
  }
  Prior p;
  p.kind = Kind::gaussian;
  p.variance_scale = variance_scale;
  return p;
}

bool Prior::contains(const Vector& theta) const {
  if (!theta.allFinite()) return false;
  if (kind == Kind::gaussian) return true;
  return (theta.array() > lower.array()).all() && (theta.array() < upper.array()).all();
}

double Prior::log_density(const Vector& theta) const {
  if (kind == Kind::uniform) {
    return contains(theta) ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return -0.5 * theta.squaredNorm() / variance_scale;
}

Vector Prior::gradient(const Vector& theta) const {
  if (kind == Kind::uniform) return Vector::Zero(theta.size());
  return -theta / variance_scale;
}

Matrix Prior::metric(Eigen::Index dim) const {
  if (kind == Kind::uniform) return Matrix::Zero(dim, dim);
  return Matrix::Identity(dim, dim) / variance_scale;
}

// ---------------------------------------------------------------- TargetModel

void TargetModel::require_columns(Eigen::Index n, std::string_view what) const {
  if (observations_.count() < 1) {
    throw InputError(std::string(what) + ": at least one observation is required");
  }
  if (observations_.values.cols() != n) {
    throw InputError(std::string(what) + ": expected " + std::to_string(n) +
                     " observation columns, got " +
                     std::to_string(observations_.values.cols()));
  }
  if (!observations_.values.allFinite()) {
    throw InputError(std::string(what) + ": observations must be finite");
  }
}

void TargetModel::require_dim(const Vector& theta) const {
  if (theta.size() != dim()) {
    throw DimensionError(std::string(to_string(kind())) + ": parameter has length " +
                         std::to_string(theta.size()) + ", expected " +
                         std::to_string(dim()));
  }
}

void TargetModel::require_support(const Vector& theta, const char* op) const {
  require_dim(theta);
  if (!in_support(theta)) {
    throw DomainError(std::string(to_string(kind())) + ": " + op +
                      " requested outside the support");
  }
}

bool TargetModel::in_support(const Vector& theta) const {
  require_dim(theta);
  if (prior_.kind == Prior::Kind::uniform && prior_.lower.size() != theta.size()) {
    throw DimensionError("prior bounds do not match the parameter dimension");
  }
  return prior_.contains(theta) && model_support(theta);
}

double TargetModel::log_posterior(const Vector& theta) const {
  if (!in_support(theta)) return -std::numeric_limits<double>::infinity();
  const double value = log_likelihood(theta) + prior_.log_density(theta);
  return std::isnan(value) ? -std::numeric_limits<double>::infinity() : value;
}

Vector TargetModel::gradient(const Vector& theta) const {
  require_support(theta, "gradient");
  return likelihood_gradient(theta) + prior_.gradient(theta);
}

FisherGeometry TargetModel::full_fisher(const Vector& theta,
                                        std::uint64_t draw_key) const {
  require_support(theta, "metric");
  FisherGeometry f = likelihood_fisher(theta, draw_key);
  f.metric += prior_.metric(dim());
  return f;
}

Matrix TargetModel::raw_metric(const Vector& theta, std::uint64_t draw_key) const {
  return full_fisher(theta, draw_key).metric;
}

SpdMatrix TargetModel::metric(const Vector& theta, std::uint64_t draw_key) const {
  return spd_repair(raw_metric(theta, draw_key));
}

std::vector<Matrix> TargetModel::metric_partials(const Vector& theta,
                                                 std::uint64_t draw_key) const {
  return full_fisher(theta, draw_key).partials;
}

MetricBundle TargetModel::metric_bundle(const Vector& theta,
                                        std::uint64_t draw_key) const {
  FisherGeometry f = full_fisher(theta, draw_key);
  return make_metric_bundle(f.metric, std::move(f.partials));
}

// ---------------------------------------------------------------- factory

Prior default_prior(ModelKind kind, Eigen::Index dim) {
  switch (kind) {
    case ModelKind::rayleigh:
      return Prior::uniform(Vector::Constant(1, 0.1), Vector::Constant(1, 10.0));
    case ModelKind::banana:
      return Prior::uniform(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
    case ModelKind::weibull:
      return Prior::uniform(Vector::Constant(2, 0.1), Vector::Constant(2, 10.0));
    case ModelKind::gaussian: {
      const GaussianParamIndex index(GaussianParamIndex::data_dim_for(dim));
      Vector lo(dim), hi(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (index.is_mean(i)) {
          lo(i) = -100.0;
          hi(i) = 100.0;
        } else if (auto [p, q] = index.covariance_pair(i); p == q) {
          lo(i) = 1e-3;
          hi(i) = 1e3;
        } else {
          // Off-diagonal coordinates carry 2 Sigma_pq.
          lo(i) = -2e3;
          hi(i) = 2e3;
        }
      }
      return Prior::uniform(std::move(lo), std::move(hi));
    }
    case ModelKind::logistic:
      return Prior::gaussian(100.0);
  }
  throw InputError("default_prior: unknown model kind");
}

std::unique_ptr<TargetModel> make_model(ModelKind kind, Observations obs,
                                        const ModelOptions& options) {
  switch (kind) {
    case ModelKind::rayleigh:
      return std::make_unique<RayleighModel>(std::move(obs), options.prior);
    case ModelKind::banana:
      return std::make_unique<BananaModel>(std::move(obs), options.prior,
                                           options.banana_metric);
    case ModelKind::weibull:
      return std::make_unique<WeibullModel>(std::move(obs),
                                            options.weibull_expectation_draws,
                                            options.weibull_expectation_seed,
                                            options.prior);
    case ModelKind::gaussian:
      return std::make_unique<GaussianModel>(std::move(obs), options.prior);
    case ModelKind::logistic:
      return std::make_unique<LogisticModel>(std::move(obs), options.logistic_alpha);
  }
  throw InputError("make_model: unknown model kind");
}

Matrix monte_carlo_metric_oracle(const TargetModel& model, const Vector& theta,
                                 int n_draws, std::uint64_t seed) {
  if (n_draws < 100) {
    throw InputError("monte_carlo_metric_oracle: n_draws must be at least 100");
  }
  if (!model.in_support(theta)) {
    throw DomainError("monte_carlo_metric_oracle: theta outside the support");
  }
  CounterRng rng(derive_key({seed, static_cast<std::uint64_t>(Stream::oracle)}));
  const Eigen::Index d = model.dim();
  Matrix acc = Matrix::Zero(d, d);
  for (int i = 0; i < n_draws; ++i) {
    const Vector s = model.sample_observation_score(theta, rng);
    acc.selfadjointView<Eigen::Lower>().rankUpdate(s);
  }
  Matrix out = acc.selfadjointView<Eigen::Lower>();
  return out * (static_cast<double>(model.observation_count()) / n_draws);
}

}  // namespace manifold_langevin
