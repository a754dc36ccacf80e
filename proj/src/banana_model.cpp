#include <cmath>

#include "manifold_langevin/errors.hpp"
#include "manifold_langevin/models.hpp"

namespace manifold_langevin {

BananaModel::BananaModel(Observations obs, std::optional<Prior> prior,
                         BananaMetric metric_form)
    : TargetModel(std::move(obs),
                  prior ? std::move(*prior) : default_prior(ModelKind::banana, 1)),
      metric_form_(metric_form) {
  require_columns(2, "banana");
}

double BananaModel::log_likelihood(const Vector& theta) const {
  const double b = theta(0);
  const auto z1 = observations().values.col(0).array();
  const auto z2 = observations().values.col(1).array();
  const auto twist = z2 + b * (z1.square() - 100.0);
  return (-z1.square() / 200.0 - 0.5 * twist.square()).sum();
}

Vector BananaModel::likelihood_gradient(const Vector& theta) const {
  const double b = theta(0);
  const auto z1 = observations().values.col(0).array();
  const auto z2 = observations().values.col(1).array();
  const auto shift = z1.square() - 100.0;
  return Vector::Constant(1, -((z2 + b * shift) * shift).sum());
}

FisherGeometry BananaModel::likelihood_fisher(const Vector& theta,
                                              std::uint64_t) const {
  const double b = theta(0);
  const double n = static_cast<double>(observation_count());
  const double c = metric_form_ == BananaMetric::exact ? 6e9 : 2e8;
  FisherGeometry f;
  f.metric = Matrix::Constant(1, 1, n * (2e4 + c * b * b));
  f.partials = {Matrix::Constant(1, 1, n * 2.0 * c * b)};
  return f;
}

Vector BananaModel::sample_observation_score(const Vector& theta,
                                             CounterRng& rng) const {
  const double b = theta(0);
  const double z1 = 10.0 * rng.normal();
  const double z2 = rng.normal();
  const double shift = z1 * z1 - 100.0;
  return Vector::Constant(1, -(z2 + b * shift) * shift);
}

}  // namespace manifold_langevin
