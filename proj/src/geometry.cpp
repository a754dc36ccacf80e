#include "manifold_langevin/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "manifold_langevin/errors.hpp"

namespace manifold_langevin {

namespace {

Matrix symmetrised(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix spectral_function(const SpdMatrix& g, double (*f)(double)) {
  const Vector mapped = g.eigenvalues().unaryExpr(f);
  const Matrix& v = g.eigenvectors();
  return symmetrised(v * mapped.asDiagonal() * v.transpose());
}

}  // namespace

SpdMatrix spd_repair(const Matrix& m, double floor) {
  if (m.rows() != m.cols()) {
    throw DimensionError("spd_repair: matrix is " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()) + ", expected square");
  }
  if (!(floor > 0.0)) {
    throw NumericError("spd_repair: floor must be positive");
  }
  if (!m.allFinite()) {
    throw NumericError("spd_repair: matrix has non-finite entries");
  }
  Matrix sym = symmetrised(m);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericError("spd_repair: eigendecomposition failed");
  }
  Vector values = eig.eigenvalues();
  Matrix vectors = eig.eigenvectors();

  // Eigenvalues that sit at the floor up to rounding count as repaired.
  const double scale = values.cwiseAbs().maxCoeff();
  const double slack = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  if (values.minCoeff() >= floor - slack) {
    return SpdMatrix(std::move(sym), std::move(values), std::move(vectors));
  }
  values = values.cwiseMax(floor);
  Matrix rebuilt = symmetrised(vectors * values.asDiagonal() * vectors.transpose());
  return SpdMatrix(std::move(rebuilt), std::move(values), std::move(vectors));
}

Matrix sqrt_inverse(const SpdMatrix& g) {
  return spectral_function(g, [](double v) { return 1.0 / std::sqrt(v); });
}

SpdMatrix inverse(const SpdMatrix& g) {
  // Reverse so the eigenvalues stay ascending.
  Vector values = g.eigenvalues().reverse().cwiseInverse();
  Matrix vectors = g.eigenvectors().rowwise().reverse();
  Matrix m = symmetrised(vectors * values.asDiagonal() * vectors.transpose());
  return SpdMatrix(std::move(m), std::move(values), std::move(vectors));
}

MetricBundle make_metric_bundle(const Matrix& metric,
                                std::vector<Matrix> partials) {
  SpdMatrix g = spd_repair(metric);
  SpdMatrix g_inv = inverse(g);
  Matrix s = sqrt_inverse(g);
  return MetricBundle{std::move(g), std::move(g_inv), std::move(s),
                      std::move(partials)};
}

Christoffel christoffel(const SpdMatrix& g, const std::vector<Matrix>& partials) {
  const Eigen::Index d = g.dim();
  if (static_cast<Eigen::Index>(partials.size()) != d) {
    throw DimensionError("christoffel: got " + std::to_string(partials.size()) +
                         " metric partials for a " + std::to_string(d) +
                         "-dimensional metric");
  }
  for (const Matrix& p : partials) {
    if (p.rows() != d || p.cols() != d) {
      throw DimensionError("christoffel: metric partial has wrong shape");
    }
  }
  const Matrix g_inv = inverse(g).matrix();

  Christoffel gamma(d);
  Vector lowered(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      // lowered_l = d_i g_jl + d_j g_il - d_l g_ij
      for (Eigen::Index l = 0; l < d; ++l) {
        lowered(l) = partials[i](j, l) + partials[j](i, l) - partials[l](i, j);
      }
      const Vector raised = g_inv * lowered;
      for (Eigen::Index k = 0; k < d; ++k) {
        gamma(k, i, j) = raised(k);
        gamma(k, j, i) = raised(k);
      }
    }
  }
  return gamma;
}

Vector connection_drift(const SpdMatrix& g_inv, const Christoffel& gamma) {
  const Eigen::Index d = g_inv.dim();
  if (gamma.dim() != d) {
    throw DimensionError("connection_drift: inverse metric is " +
                         std::to_string(d) + "-dimensional, connection is " +
                         std::to_string(gamma.dim()) + "-dimensional");
  }
  const Matrix& h = g_inv.matrix();
  Vector c = Vector::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      for (Eigen::Index l = 0; l < d; ++l) {
        acc += h(k, l) * gamma(i, k, l);
      }
    }
    c(i) = -0.5 * acc;
  }
  return c;
}

Vector inverse_metric_divergence(const SpdMatrix& g_inv,
                                 const std::vector<Matrix>& partials) {
  const Eigen::Index d = g_inv.dim();
  if (static_cast<Eigen::Index>(partials.size()) != d) {
    throw DimensionError("inverse_metric_divergence: partial count mismatch");
  }
  const Matrix& h = g_inv.matrix();
  Vector omega = Vector::Zero(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    // column j of d(g^{-1})/d theta_j
    omega -= h * (partials[j] * h.col(j));
  }
  return 0.5 * omega;
}

double log_gaussian_density(const Vector& x, const Vector& mean,
                            const SpdMatrix& cov) {
  const Eigen::Index d = cov.dim();
  if (x.size() != d || mean.size() != d) {
    throw DimensionError("log_gaussian_density: dimension mismatch");
  }
  Eigen::LLT<Matrix> llt(cov.matrix());
  if (llt.info() != Eigen::Success) {
    throw NumericError("log_gaussian_density: covariance is singular");
  }
  const Vector z = llt.matrixL().solve(x - mean);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) +
                 log_det + z.squaredNorm());
}

double log_gaussian_density_precision(const Vector& x, const Vector& mean,
                                      const SpdMatrix& precision, double scale) {
  const Eigen::Index d = precision.dim();
  if (x.size() != d || mean.size() != d) {
    throw DimensionError("log_gaussian_density_precision: dimension mismatch");
  }
  const Vector r = x - mean;
  const double quad = r.dot(precision.matrix() * r) / scale;
  const double log_det_precision = precision.eigenvalues().array().log().sum();
  return -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi * scale) -
                 log_det_precision + quad);
}

}  // namespace manifold_langevin
