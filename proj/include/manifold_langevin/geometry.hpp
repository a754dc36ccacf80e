#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace manifold_langevin {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point on the parameter manifold (the MCMC state).
using ParameterPoint = Eigen::VectorXd;

/// Eigenvalue floor applied before every inversion or square root.
inline constexpr double kSpdFloor = 1e-10;

/// Symmetric positive definite matrix. Only constructible through
/// spd_repair, so every instance is symmetric with eigenvalues >= floor.
class SpdMatrix {
 public:
  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  /// Eigenvalues in ascending order, as computed during the repair.
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }

 private:
  friend SpdMatrix spd_repair(const Matrix& m, double floor);
  friend SpdMatrix inverse(const SpdMatrix& g);
  SpdMatrix(Matrix m, Vector eigenvalues, Matrix eigenvectors)
      : m_(std::move(m)),
        eigenvalues_(std::move(eigenvalues)),
        eigenvectors_(std::move(eigenvectors)) {}

  Matrix m_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

/// Symmetrises m and clamps its spectrum below at `floor`.
///
/// When no eigenvalue needs clamping the symmetrised input is returned
/// unchanged (not re-assembled), which makes the operation idempotent
/// bit-for-bit.
///
/// Throws DimensionError for non-square input, NumericError for non-finite
/// entries or a non-positive floor.
SpdMatrix spd_repair(const Matrix& m, double floor = kSpdFloor);

/// Symmetric spectral square root S of g^{-1}, so that S * S = g^{-1}.
Matrix sqrt_inverse(const SpdMatrix& g);

/// Spectral inverse of an SPD matrix, returned as SPD.
SpdMatrix inverse(const SpdMatrix& g);

/// G, G^{-1}, sqrt(G^{-1}) and the coordinate partials dG/dtheta_r at one
/// point. All three matrix forms share a single eigendecomposition.
struct MetricBundle {
  SpdMatrix metric;
  SpdMatrix inverse;
  Matrix sqrt_inverse;
  std::vector<Matrix> partials;

  Eigen::Index dim() const { return metric.dim(); }
};

/// Builds a bundle from a raw (possibly slightly asymmetric) metric.
MetricBundle make_metric_bundle(const Matrix& metric,
                                std::vector<Matrix> partials);

/// Connection coefficients gamma^k_ij stored densely, k-major.
class Christoffel {
 public:
  explicit Christoffel(Eigen::Index dim)
      : dim_(dim), symbols_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  Eigen::Index dim() const { return dim_; }

  double operator()(Eigen::Index k, Eigen::Index i, Eigen::Index j) const {
    return symbols_[index(k, i, j)];
  }
  double& operator()(Eigen::Index k, Eigen::Index i, Eigen::Index j) {
    return symbols_[index(k, i, j)];
  }

 private:
  std::size_t index(Eigen::Index k, Eigen::Index i, Eigen::Index j) const {
    return static_cast<std::size_t>((k * dim_ + i) * dim_ + j);
  }

  Eigen::Index dim_;
  std::vector<double> symbols_;
};

/// gamma^k_ij = g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
///
/// This is twice the Levi-Civita symbol. With this normalisation the
/// connection drift -1/2 g^{kl} gamma^i_kl reduces, in one dimension, to
/// -1/2 g^{-2} dg/dtheta, which is the drift of the developed Langevin
/// equation used throughout the library. The upper (i, j) triangle is copied
/// from the lower one so the symmetry holds bit-for-bit.
///
/// Throws DimensionError if partials.size() != dim or any partial has the
/// wrong shape.
Christoffel christoffel(const SpdMatrix& g, const std::vector<Matrix>& partials);

/// c^i = -1/2 sum_{k,l} (g^{-1})_{kl} gamma^i_{kl}.
Vector connection_drift(const SpdMatrix& g_inv, const Christoffel& gamma);

/// Omega_i = 1/2 sum_j d(g^{-1})_{ij} / d theta_j, using
/// d(g^{-1}) = -g^{-1} (dg) g^{-1}.
Vector inverse_metric_divergence(const SpdMatrix& g_inv,
                                 const std::vector<Matrix>& partials);

/// log N(x; mean, cov) including the normalising constant.
double log_gaussian_density(const Vector& x, const Vector& mean,
                            const SpdMatrix& cov);

/// log N(x; mean, scale * precision^{-1}) evaluated from the precision
/// matrix directly, avoiding an inversion. scale must be > 0.
double log_gaussian_density_precision(const Vector& x, const Vector& mean,
                                      const SpdMatrix& precision, double scale);

/// Central-difference step for coordinate value v: 1e-5 * max(1, |v|).
inline double fd_step(double v) {
  return 1e-5 * std::max(1.0, std::abs(v));
}

}  // namespace manifold_langevin
