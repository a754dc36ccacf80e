#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "manifold_langevin/geometry.hpp"
#include "manifold_langevin/random.hpp"

namespace manifold_langevin {

enum class ModelKind { rayleigh, banana, weibull, gaussian, logistic };

std::string_view to_string(ModelKind kind);

/// Accepts "rayleigh", "banana", "weibull", "gaussian", "logistic" (or
/// "logreg"). Throws InputError otherwise.
ModelKind parse_model_kind(std::string_view name);

/// Prior on the parameter vector. Uniform priors contribute nothing inside
/// their box and make the posterior -inf outside it; the Gaussian prior is
/// N(0, variance_scale * I).
struct Prior {
  enum class Kind { uniform, gaussian };

  Kind kind = Kind::uniform;
  Vector lower;
  Vector upper;
  double variance_scale = 100.0;

  static Prior uniform(Vector lower, Vector upper);
  static Prior gaussian(double variance_scale);

  bool contains(const Vector& theta) const;
  /// Log density up to an additive constant.
  double log_density(const Vector& theta) const;
  Vector gradient(const Vector& theta) const;
  /// Contribution to the metric (zero for uniform priors).
  Matrix metric(Eigen::Index dim) const;
};

/// Tabular observations, one row per observation. Column names follow the
/// CSV convention z1..zk (distribution models) or x1..xD,t (logistic).
struct Observations {
  Matrix values;
  std::vector<std::string> columns;

  Eigen::Index count() const { return values.rows(); }
};

/// Metric and its coordinate partials, before SPD repair.
struct FisherGeometry {
  Matrix metric;
  std::vector<Matrix> partials;
};

/// Uniform interface over the parameter-estimation targets.
///
/// log_posterior returns -inf outside the support and never throws for a
/// correctly sized point. gradient, metric and metric_partials require a
/// point strictly inside the support and throw DomainError otherwise.
///
/// Models whose metric is a Monte-Carlo estimate (stochastic_metric()) take
/// the draw key into account; analytic models ignore it.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual ModelKind kind() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual bool stochastic_metric() const { return false; }

  const Prior& prior() const { return prior_; }
  const Observations& observations() const { return observations_; }
  Eigen::Index observation_count() const { return observations_.count(); }

  bool in_support(const Vector& theta) const;
  double log_posterior(const Vector& theta) const;
  Vector gradient(const Vector& theta) const;
  SpdMatrix metric(const Vector& theta, std::uint64_t draw_key = 0) const;
  std::vector<Matrix> metric_partials(const Vector& theta,
                                      std::uint64_t draw_key = 0) const;
  MetricBundle metric_bundle(const Vector& theta, std::uint64_t draw_key = 0) const;

  /// Metric before SPD repair (data term plus prior term).
  Matrix raw_metric(const Vector& theta, std::uint64_t draw_key = 0) const;

  /// Draws one synthetic observation at theta and returns its score
  /// (likelihood gradient only). Used by the Monte-Carlo metric oracle.
  virtual Vector sample_observation_score(const Vector& theta,
                                          CounterRng& rng) const = 0;

 protected:
  TargetModel(Observations observations, Prior prior)
      : observations_(std::move(observations)), prior_(std::move(prior)) {}

  virtual bool model_support(const Vector&) const { return true; }
  virtual double log_likelihood(const Vector& theta) const = 0;
  virtual Vector likelihood_gradient(const Vector& theta) const = 0;
  virtual FisherGeometry likelihood_fisher(const Vector& theta,
                                           std::uint64_t draw_key) const = 0;

  void require_columns(Eigen::Index n, std::string_view what) const;

 private:
  void require_dim(const Vector& theta) const;
  void require_support(const Vector& theta, const char* op) const;
  FisherGeometry full_fisher(const Vector& theta, std::uint64_t draw_key) const;

  Observations observations_;
  Prior prior_;
};

/// Rayleigh(sigma), theta = (sigma).
class RayleighModel final : public TargetModel {
 public:
  explicit RayleighModel(Observations obs, std::optional<Prior> prior = {});
  ModelKind kind() const override { return ModelKind::rayleigh; }
  Eigen::Index dim() const override { return 1; }
  Vector sample_observation_score(const Vector& theta, CounterRng& rng) const override;

  double sum_of_squares() const { return sum_sq_; }

 private:
  double log_likelihood(const Vector& theta) const override;
  Vector likelihood_gradient(const Vector& theta) const override;
  FisherGeometry likelihood_fisher(const Vector& theta, std::uint64_t) const override;

  double sum_log_ = 0.0;
  double sum_sq_ = 0.0;
};

/// Which closed form the Banana metric uses. Both are expectations of the
/// squared score over (z1, z2) ~ N(0, diag(100, 1)):
///   exact:   2e4 + 6e9 B^2 (uses E z^6 = 15 s^6, E z^8 = 105 s^8)
///   printed: 2e4 + 2e8 B^2 (the commonly quoted form, derived with
///            E z^6 = 5 s^6 and E z^8 = 7 s^8)
enum class BananaMetric { exact, printed };

/// Banana-shaped (twisted Gaussian) density with twist B, theta = (B).
/// Observations are (z1, z2) pairs with
///   p(z1, z2; B) ~ exp(-z1^2/200 - (z2 + B z1^2 - 100 B)^2 / 2).
class BananaModel final : public TargetModel {
 public:
  explicit BananaModel(Observations obs, std::optional<Prior> prior = {},
                       BananaMetric metric_form = BananaMetric::exact);
  ModelKind kind() const override { return ModelKind::banana; }
  Eigen::Index dim() const override { return 1; }

  /// Draws (z1, z2) from the untwisted N(0, diag(100, 1)) law, which is the
  /// law the closed-form metric is an expectation over.
  Vector sample_observation_score(const Vector& theta, CounterRng& rng) const override;

 private:
  double log_likelihood(const Vector& theta) const override;
  Vector likelihood_gradient(const Vector& theta) const override;
  FisherGeometry likelihood_fisher(const Vector& theta, std::uint64_t) const override;

  BananaMetric metric_form_;
};

/// Monte-Carlo expectations over x ~ Weibull(lambda, k) entering the Weibull
/// metric. s = (x / lambda)^k.
struct WeibullExpectations {
  double s = 0.0;               ///< E[s]
  double s_minus_one = 0.0;     ///< E[s - 1]
  double s_minus_one_sq = 0.0;  ///< E[(s - 1)^2]
  double score_k_sq = 0.0;      ///< E[(1/k - log lambda + log x - s log(x/lambda))^2]
  double cross = 0.0;           ///< E[(s - 1)(log x - s log(x/lambda))]
};

/// Throws DomainError for non-positive parameters, InputError for n_draws < 1.
WeibullExpectations weibull_expectations(double lambda, double k, int n_draws,
                                         std::uint64_t seed);

/// Weibull(lambda, k), theta = (lambda, k). The metric is a Monte-Carlo
/// estimate from `expectation_draws` Weibull samples per evaluation, keyed
/// by the draw key so that one chain step sees one fixed draw set.
class WeibullModel final : public TargetModel {
 public:
  WeibullModel(Observations obs, int expectation_draws = 2000,
               std::uint64_t expectation_seed = 0, std::optional<Prior> prior = {});
  ModelKind kind() const override { return ModelKind::weibull; }
  Eigen::Index dim() const override { return 2; }
  bool stochastic_metric() const override { return true; }
  Vector sample_observation_score(const Vector& theta, CounterRng& rng) const override;

  int expectation_draws() const { return draws_; }

 private:
  double log_likelihood(const Vector& theta) const override;
  Vector likelihood_gradient(const Vector& theta) const override;
  FisherGeometry likelihood_fisher(const Vector& theta,
                                   std::uint64_t draw_key) const override;

  int draws_;
  std::uint64_t seed_;
  double sum_log_ = 0.0;
};

/// Flat parameter index for a d-dimensional Gaussian with unknown mean and
/// covariance: (mu_1..mu_d, S_11, S_21, S_22, S_31, ..., S_dd), D = (d^2+3d)/2.
///
/// Diagonal covariance coordinates are Sigma_pp. Off-diagonal coordinates
/// carry the symmetric pair Sigma_pq + Sigma_qp = 2 Sigma_pq; in these
/// coordinates the entrywise score -Sigma^{-1}/2 + Sigma^{-1} r r^T
/// Sigma^{-1}/2 is the exact gradient and the block metric below is the
/// exact Fisher information.
class GaussianParamIndex {
 public:
  explicit GaussianParamIndex(Eigen::Index data_dim);

  Eigen::Index data_dim() const { return d_; }
  Eigen::Index size() const { return d_ + static_cast<Eigen::Index>(pairs_.size()); }

  bool is_mean(Eigen::Index i) const { return i < d_; }
  /// (p, q) with p >= q for a covariance coordinate i >= d.
  std::pair<Eigen::Index, Eigen::Index> covariance_pair(Eigen::Index i) const;
  Eigen::Index covariance_index(Eigen::Index p, Eigen::Index q) const;

  Vector to_theta(const Vector& mean, const Matrix& covariance) const;
  Vector mean(const Vector& theta) const;
  Matrix covariance(const Vector& theta) const;

  static Eigen::Index data_dim_for(Eigen::Index parameter_count);

 private:
  Eigen::Index d_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs_;
};

/// Multivariate normal with unknown mean and covariance.
class GaussianModel final : public TargetModel {
 public:
  explicit GaussianModel(Observations obs, std::optional<Prior> prior = {});
  ModelKind kind() const override { return ModelKind::gaussian; }
  Eigen::Index dim() const override { return index_.size(); }
  Vector sample_observation_score(const Vector& theta, CounterRng& rng) const override;

  const GaussianParamIndex& index() const { return index_; }

 private:
  GaussianModel(GaussianParamIndex index, Observations&& obs, std::optional<Prior> prior);

  /// sum_n (y_n - mu)(y_n - mu)^T
  Matrix scatter(const Vector& mu) const;
  bool model_support(const Vector& theta) const override;
  double log_likelihood(const Vector& theta) const override;
  Vector likelihood_gradient(const Vector& theta) const override;
  FisherGeometry likelihood_fisher(const Vector& theta, std::uint64_t) const override;

  GaussianParamIndex index_;
  Vector sum_;   // sum of observations
  Matrix sum_outer_;  // sum of y y^T
};

/// Bayesian logistic regression with prior N(0, alpha I) on beta (D+1
/// coefficients including the intercept).
class LogisticModel final : public TargetModel {
 public:
  explicit LogisticModel(Observations obs, double alpha = 100.0);
  ModelKind kind() const override { return ModelKind::logistic; }
  Eigen::Index dim() const override { return design_.cols(); }
  Vector sample_observation_score(const Vector& theta, CounterRng& rng) const override;

  /// N x (D+1) design matrix with a leading column of ones.
  const Matrix& design() const { return design_; }
  const Vector& responses() const { return responses_; }

 private:
  double log_likelihood(const Vector& theta) const override;
  Vector likelihood_gradient(const Vector& theta) const override;
  FisherGeometry likelihood_fisher(const Vector& theta, std::uint64_t) const override;

  Matrix design_;
  Vector responses_;
};

/// Construction options shared by the factory.
struct ModelOptions {
  std::optional<Prior> prior;
  double logistic_alpha = 100.0;
  BananaMetric banana_metric = BananaMetric::exact;
  int weibull_expectation_draws = 2000;
  std::uint64_t weibull_expectation_seed = 0;
};

std::unique_ptr<TargetModel> make_model(ModelKind kind, Observations obs,
                                        const ModelOptions& options = {});

/// Default uniform prior box per model (not used by logistic regression).
Prior default_prior(ModelKind kind, Eigen::Index dim);

/// Empirical N * mean over n_draws of s s^T, where s is the score of one
/// synthetic observation drawn at theta. Estimates the likelihood part of
/// the metric. Throws InputError for n_draws < 100.
Matrix monte_carlo_metric_oracle(const TargetModel& model, const Vector& theta,
                                 int n_draws, std::uint64_t seed);

}  // namespace manifold_langevin
