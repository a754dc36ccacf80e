#include <cmath>

#include "manifold_langevin/data_forge.hpp"
#include "manifold_langevin/errors.hpp"
#include "manifold_langevin/models.hpp"

namespace manifold_langevin {

RayleighModel::RayleighModel(Observations obs, std::optional<Prior> prior)
    : TargetModel(std::move(obs),
                  prior ? std::move(*prior) : default_prior(ModelKind::rayleigh, 1)) {
  require_columns(1, "rayleigh");
  const auto z = observations().values.col(0).array();
  if ((z <= 0.0).any()) {
    throw InputError("rayleigh: observations must be strictly positive");
  }
  sum_log_ = z.log().sum();
  sum_sq_ = z.square().sum();
}

double RayleighModel::log_likelihood(const Vector& theta) const {
  const double sigma = theta(0);
  const double n = static_cast<double>(observation_count());
  return sum_log_ - 2.0 * n * std::log(sigma) - sum_sq_ / (2.0 * sigma * sigma);
}

Vector RayleighModel::likelihood_gradient(const Vector& theta) const {
  const double sigma = theta(0);
  const double n = static_cast<double>(observation_count());
  return Vector::Constant(1, -2.0 * n / sigma + sum_sq_ / (sigma * sigma * sigma));
}

FisherGeometry RayleighModel::likelihood_fisher(const Vector& theta,
                                                std::uint64_t) const {
  const double sigma = theta(0);
  const double n = static_cast<double>(observation_count());
  FisherGeometry f;
  f.metric = Matrix::Constant(1, 1, 4.0 * n / (sigma * sigma));
  f.partials = {Matrix::Constant(1, 1, -8.0 * n / (sigma * sigma * sigma))};
  return f;
}

Vector RayleighModel::sample_observation_score(const Vector& theta,
                                               CounterRng& rng) const {
  const double sigma = theta(0);
  const double x = rayleigh_from_uniform(sigma, rng.uniform());
  return Vector::Constant(1, -2.0 / sigma + x * x / (sigma * sigma * sigma));
}

}  // namespace manifold_langevin
