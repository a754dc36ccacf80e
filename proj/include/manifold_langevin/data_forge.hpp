#pragma once

#include <cstdint>

#include "manifold_langevin/geometry.hpp"
#include "manifold_langevin/models.hpp"
#include "manifold_langevin/random.hpp"

namespace manifold_langevin {

// Single-draw transforms. Each inverse-CDF draw consumes exactly one uniform.

inline double rayleigh_from_uniform(double sigma, double u) {
  return sigma * std::sqrt(-2.0 * std::log(u));
}

inline double weibull_from_uniform(double lambda, double k, double u) {
  return lambda * std::pow(-std::log(u), 1.0 / k);
}

/// Unit-Jacobian shear taking (w1, w2) ~ N(0, diag(100, 1)) to a banana pair.
inline Eigen::Vector2d banana_shear(double b, double w1, double w2) {
  return {w1, w2 - b * w1 * w1 + 100.0 * b};
}

inline double logistic(double eta) {
  return eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta))
                    : std::exp(eta) / (1.0 + std::exp(eta));
}

/// All generators are pure functions of their arguments and seed.
/// Throws InputError for n < 1.

/// Column z1. Throws DomainError for sigma <= 0.
Observations gen_rayleigh(double sigma, Eigen::Index n, std::uint64_t seed);

/// Columns z1, z2.
Observations gen_banana(double b, Eigen::Index n, std::uint64_t seed);

/// Column z1. Throws DomainError for non-positive parameters.
Observations gen_weibull(double lambda, double k, Eigen::Index n, std::uint64_t seed);

/// Columns z1..zd. Throws NumericError if covariance is not SPD.
Observations gen_mvn(const Vector& mean, const Matrix& covariance, Eigen::Index n,
                     std::uint64_t seed);

/// Columns x1..xD, t with features uniform(feature_low, feature_high).
/// Throws InputError unless beta.size() == d + 1 and feature_low < feature_high.
Observations gen_logreg(const Vector& beta, Eigen::Index n, Eigen::Index d,
                        double feature_low, double feature_high, std::uint64_t seed);

/// Coefficient vector of length d + 1 with the sign pattern used for the
/// logistic-regression benchmark: the first 5/6 of the coefficients uniform
/// in [0, 15], the rest uniform in [-15, -10].
Vector logreg_benchmark_beta(Eigen::Index d, std::uint64_t seed);

}  // namespace manifold_langevin
