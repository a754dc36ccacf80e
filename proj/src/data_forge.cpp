#include "manifold_langevin/data_forge.hpp"

#include <cmath>
#include <string>

#include "manifold_langevin/errors.hpp"

namespace manifold_langevin {

namespace {

void require_count(Eigen::Index n, const char* where) {
  if (n < 1) {
    throw InputError(std::string(where) + ": observation count must be at least 1");
  }
}

CounterRng data_rng(std::uint64_t seed) {
  return CounterRng(derive_key({seed, static_cast<std::uint64_t>(Stream::data)}));
}

std::vector<std::string> z_columns(Eigen::Index k) {
  std::vector<std::string> names;
  for (Eigen::Index i = 1; i <= k; ++i) names.push_back("z" + std::to_string(i));
  return names;
}

}  // namespace

Observations gen_rayleigh(double sigma, Eigen::Index n, std::uint64_t seed) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("gen_rayleigh: sigma must be positive");
  }
  require_count(n, "gen_rayleigh");
  CounterRng rng = data_rng(seed);
  Observations obs{Matrix(n, 1), z_columns(1)};
  for (Eigen::Index i = 0; i < n; ++i) obs.values(i, 0) = rayleigh_from_uniform(sigma, rng.uniform());
  return obs;
}

Observations gen_banana(double b, Eigen::Index n, std::uint64_t seed) {
  if (!std::isfinite(b)) throw DomainError("gen_banana: B must be finite");
  require_count(n, "gen_banana");
  CounterRng rng = data_rng(seed);
  Observations obs{Matrix(n, 2), z_columns(2)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w1 = 10.0 * rng.normal();
    const double w2 = rng.normal();
    obs.values.row(i) = banana_shear(b, w1, w2).transpose();
  }
  return obs;
}

Observations gen_weibull(double lambda, double k, Eigen::Index n, std::uint64_t seed) {
  if (!(lambda > 0.0) || !(k > 0.0) || !std::isfinite(lambda) || !std::isfinite(k)) {
    throw DomainError("gen_weibull: lambda and k must be positive");
  }
  require_count(n, "gen_weibull");
  CounterRng rng = data_rng(seed);
  Observations obs{Matrix(n, 1), z_columns(1)};
  for (Eigen::Index i = 0; i < n; ++i) {
    obs.values(i, 0) = weibull_from_uniform(lambda, k, rng.uniform());
  }
  return obs;
}

Observations gen_mvn(const Vector& mean, const Matrix& covariance, Eigen::Index n,
                     std::uint64_t seed) {
  const Eigen::Index d = mean.size();
  if (covariance.rows() != d || covariance.cols() != d) {
    throw DimensionError("gen_mvn: covariance does not match the mean dimension");
  }
  require_count(n, "gen_mvn");
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success || !covariance.isApprox(covariance.transpose())) {
    throw NumericError("gen_mvn: covariance is not symmetric positive definite");
  }
  const Matrix factor = llt.matrixL();
  CounterRng rng = data_rng(seed);
  Observations obs{Matrix(n, d), z_columns(d)};
  Vector z(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal();
    obs.values.row(i) = (mean + factor * z).transpose();
  }
  return obs;
}

Observations gen_logreg(const Vector& beta, Eigen::Index n, Eigen::Index d,
                        double feature_low, double feature_high, std::uint64_t seed) {
  if (d < 1 || beta.size() != d + 1) {
    throw InputError("gen_logreg: beta must have length D + 1");
  }
  if (!(feature_low < feature_high) || !std::isfinite(feature_low) ||
      !std::isfinite(feature_high)) {
    throw InputError("gen_logreg: feature bounds must satisfy low < high");
  }
  require_count(n, "gen_logreg");
  CounterRng rng = data_rng(seed);
  Observations obs{Matrix(n, d + 1), {}};
  for (Eigen::Index j = 1; j <= d; ++j) obs.columns.push_back("x" + std::to_string(j));
  obs.columns.push_back("t");
  const double width = feature_high - feature_low;
  for (Eigen::Index i = 0; i < n; ++i) {
    double eta = beta(0);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double x = feature_low + width * rng.uniform();
      obs.values(i, j) = x;
      eta += beta(j + 1) * x;
    }
    obs.values(i, d) = rng.uniform() < logistic(eta) ? 1.0 : 0.0;
  }
  return obs;
}

Vector logreg_benchmark_beta(Eigen::Index d, std::uint64_t seed) {
  if (d < 1) throw InputError("logreg_benchmark_beta: D must be positive");
  const Eigen::Index size = d + 1;
  const Eigen::Index negative =
      std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::lround(size / 6.0)));
  CounterRng rng(derive_key({seed, static_cast<std::uint64_t>(Stream::data), 0xbe7a}));
  Vector beta(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    beta(i) = i < size - negative ? 15.0 * rng.uniform() : -15.0 + 5.0 * rng.uniform();
  }
  return beta;
}

}  // namespace manifold_langevin
