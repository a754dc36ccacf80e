#include <cmath>

#include "manifold_langevin/data_forge.hpp"
#include "manifold_langevin/errors.hpp"
#include "manifold_langevin/models.hpp"

namespace manifold_langevin {

namespace {

void require_positive(double lambda, double k, const char* where) {
  if (!(lambda > 0.0) || !(k > 0.0) || !std::isfinite(lambda) || !std::isfinite(k)) {
    throw DomainError(std::string(where) + ": lambda and k must be positive");
  }
}

}  // namespace

WeibullExpectations weibull_expectations(double lambda, double k, int n_draws,
                                         std::uint64_t seed) {
  require_positive(lambda, k, "weibull_expectations");
  if (n_draws < 1) {
    throw InputError("weibull_expectations: n_draws must be positive");
  }
  CounterRng rng(derive_key({seed, static_cast<std::uint64_t>(Stream::expectation)}));
  const double log_lambda = std::log(lambda);
  WeibullExpectations e;
  for (int j = 0; j < n_draws; ++j) {
    // x = lambda * t^(1/k) with t ~ Exp(1), so s = (x/lambda)^k = t exactly.
    const double t = -std::log(rng.uniform());
    const double log_ratio = std::log(t) / k;  // log(x / lambda)
    const double log_x = log_lambda + log_ratio;
    const double score_k = 1.0 / k - log_lambda + log_x - t * log_ratio;
    e.s += t;
    e.s_minus_one += t - 1.0;
    e.s_minus_one_sq += (t - 1.0) * (t - 1.0);
    e.score_k_sq += score_k * score_k;
    e.cross += (t - 1.0) * (log_x - t * log_ratio);
  }
  const double inv = 1.0 / n_draws;
  e.s *= inv;
  e.s_minus_one *= inv;
  e.s_minus_one_sq *= inv;
  e.score_k_sq *= inv;
  e.cross *= inv;
  return e;
}

WeibullModel::WeibullModel(Observations obs, int expectation_draws,
                           std::uint64_t expectation_seed, std::optional<Prior> prior)
    : TargetModel(std::move(obs),
                  prior ? std::move(*prior) : default_prior(ModelKind::weibull, 2)),
      draws_(expectation_draws),
      seed_(expectation_seed) {
  require_columns(1, "weibull");
  if (draws_ < 1) {
    throw InputError("weibull: expectation draw count must be positive");
  }
  const auto x = observations().values.col(0).array();
  if ((x <= 0.0).any()) {
    throw InputError("weibull: observations must be strictly positive");
  }
  sum_log_ = x.log().sum();
}

double WeibullModel::log_likelihood(const Vector& theta) const {
  const double lambda = theta(0);
  const double k = theta(1);
  const double n = static_cast<double>(observation_count());
  const auto x = observations().values.col(0).array();
  const double sum_s = (x / lambda).pow(k).sum();
  return n * std::log(k) - n * k * std::log(lambda) + (k - 1.0) * sum_log_ - sum_s;
}

Vector WeibullModel::likelihood_gradient(const Vector& theta) const {
  const double lambda = theta(0);
  const double k = theta(1);
  const double n = static_cast<double>(observation_count());
  const auto x = observations().values.col(0).array();
  const Eigen::ArrayXd log_ratio = (x / lambda).log();
  const Eigen::ArrayXd s = (k * log_ratio).exp();
  Vector g(2);
  g(0) = (k / lambda) * (s.sum() - n);
  g(1) = n / k - n * std::log(lambda) + sum_log_ - (s * log_ratio).sum();
  return g;
}

FisherGeometry WeibullModel::likelihood_fisher(const Vector& theta,
                                               std::uint64_t draw_key) const {
  const double lambda = theta(0);
  const double k = theta(1);
  const double n = static_cast<double>(observation_count());
  const WeibullExpectations e =
      weibull_expectations(lambda, k, draws_, derive_key({seed_, draw_key}));

  const double a = k / lambda;
  const double g11 = a * a * e.s_minus_one_sq;
  const double g12 = a * (1.0 / k - std::log(lambda)) * e.s_minus_one + a * e.cross;
  const double g22 = e.score_k_sq;

  FisherGeometry f;
  f.metric.resize(2, 2);
  f.metric << g11, g12, g12, g22;
  f.metric *= n;

  // Exact derivatives of the estimator above with its Exp(1) draws held
  // fixed (x = lambda * t^(1/k)): G11 ~ (k/lambda)^2, G12 ~ 1/lambda and
  // G22 ~ 1/k^2 times lambda- and k-free averages.
  Matrix d_lambda(2, 2), d_k(2, 2);
  d_lambda << -2.0 * g11 / lambda, -g12 / lambda, -g12 / lambda, 0.0;
  d_k << 2.0 * g11 / k, 0.0, 0.0, -2.0 * g22 / k;
  f.partials = {n * d_lambda, n * d_k};
  return f;
}

Vector WeibullModel::sample_observation_score(const Vector& theta,
                                              CounterRng& rng) const {
  const double lambda = theta(0);
  const double k = theta(1);
  const double x = weibull_from_uniform(lambda, k, rng.uniform());
  const double log_ratio = std::log(x / lambda);
  const double s = std::exp(k * log_ratio);
  Vector score(2);
  score(0) = (k / lambda) * (s - 1.0);
  score(1) = 1.0 / k + log_ratio - s * log_ratio;
  return score;
}

}  // namespace manifold_langevin
