#include "manifold_langevin/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "manifold_langevin/data_forge.hpp"
#include "manifold_langevin/errors.hpp"
#include "manifold_langevin/experiment.hpp"
#include "manifold_langevin/fokker_planck.hpp"

namespace manifold_langevin {

Vector fd_gradient(const TargetModel& model, const Vector& theta) {
  Vector g(theta.size());
  for (Eigen::Index r = 0; r < theta.size(); ++r) {
    const double h = fd_step(theta(r));
    Vector up = theta, down = theta;
    up(r) += h;
    down(r) -= h;
    g(r) = (model.log_posterior(up) - model.log_posterior(down)) / (2.0 * h);
  }
  return g;
}

std::vector<Matrix> fd_metric_partials(const TargetModel& model, const Vector& theta,
                                       std::uint64_t draw_key) {
  std::vector<Matrix> out;
  for (Eigen::Index r = 0; r < theta.size(); ++r) {
    const double h = fd_step(theta(r));
    Vector up = theta, down = theta;
    up(r) += h;
    down(r) -= h;
    out.push_back((model.raw_metric(up, draw_key) - model.raw_metric(down, draw_key)) /
                  (2.0 * h));
  }
  return out;
}

double christoffel_relative_error(const Christoffel& a, const Christoffel& b,
                                  double floor) {
  if (a.dim() != b.dim()) throw DimensionError("christoffel dimension mismatch");
  double diff = 0.0, scale = 0.0;
  const Eigen::Index d = a.dim();
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        diff = std::max(diff, std::abs(a(k, i, j) - b(k, i, j)));
        scale = std::max(scale, std::abs(a(k, i, j)));
      }
    }
  }
  return diff / std::max(scale, floor);
}

bool christoffel_symmetric(const Christoffel& gamma) {
  const Eigen::Index d = gamma.dim();
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) {
        if (gamma(k, i, j) != gamma(k, j, i)) return false;
      }
    }
  }
  return true;
}

namespace {

std::string format(const char* fmt, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

double max_abs(const std::vector<Matrix>& ms) {
  double m = 0.0;
  for (const auto& x : ms) m = std::max(m, x.cwiseAbs().maxCoeff());
  return m;
}

CheckResult below(std::string name, double measured, double tol, std::string detail = {}) {
  return CheckResult{std::move(name), measured < tol, measured, tol, std::move(detail)};
}

}  // namespace

std::vector<CheckResult> run_model_checks(const TargetModel& model, const Vector& theta_true,
                                          const CheckOptions& options) {
  const std::string tag(to_string(model.kind()));
  std::vector<Vector> points;
  for (int p = 0; p < options.points; ++p) {
    points.push_back(initial_point(model, theta_true, options.init_box, options.seed,
                                   static_cast<std::size_t>(p)));
  }
  const std::uint64_t key = derive_key({options.seed, 0xd1a6});

  double grad_err = 0.0, partial_err = 0.0, gamma_err = 0.0;
  bool symmetric = true;
  for (const Vector& theta : points) {
    const Vector g = model.gradient(theta);
    const Vector fd = fd_gradient(model, theta);
    grad_err = std::max(grad_err, (g - fd).cwiseAbs().maxCoeff() /
                                      std::max(1.0, g.cwiseAbs().maxCoeff()));

    const Matrix raw = model.raw_metric(theta, key);
    std::vector<Matrix> analytic = model.metric_partials(theta, key);
    if (options.corrupt_partials) {
      const double bump = 1e-2 * std::max(1.0, raw.cwiseAbs().maxCoeff());
      analytic.back()(0, 0) += bump;
    }
    const std::vector<Matrix> numeric = fd_metric_partials(model, theta, key);
    double diff = 0.0;
    for (std::size_t r = 0; r < analytic.size(); ++r) {
      diff = std::max(diff, (analytic[r] - numeric[r]).cwiseAbs().maxCoeff());
    }
    const double scale = std::max(max_abs(analytic), 1e-12 * raw.cwiseAbs().maxCoeff());
    partial_err = std::max(partial_err, diff / std::max(scale, 1e-300));

    const SpdMatrix g_spd = spd_repair(raw);
    const Christoffel gamma = christoffel(g_spd, analytic);
    const Christoffel gamma_fd = christoffel(g_spd, numeric);
    symmetric = symmetric && christoffel_symmetric(gamma);
    const double gamma_scale = 1e-12 * max_abs(std::vector<Matrix>{g_spd.matrix()});
    gamma_err = std::max(gamma_err, christoffel_relative_error(gamma, gamma_fd, gamma_scale));
  }

  std::vector<CheckResult> out;
  out.push_back(below(tag + " gradient vs finite differences", grad_err, 1e-5));
  out.push_back(below(tag + " metric partials vs finite differences", partial_err, 1e-4));
  out.push_back(CheckResult{tag + " christoffel symmetry (bit-exact)", symmetric,
                            symmetric ? 0.0 : 1.0, 0.0, {}});
  out.push_back(below(tag + " christoffel vs finite-difference metric", gamma_err, 1e-4));

  if (model.stochastic_metric()) {
    out.push_back(CheckResult{tag + " metric vs Monte-Carlo oracle", true, 0.0, 0.05,
                              "skipped: metric is itself a Monte-Carlo estimate"});
  } else {
    double mc_err = 0.0;
    const int n_mc = std::min<int>(options.mc_points, static_cast<int>(points.size()));
    for (int p = 0; p < n_mc; ++p) {
      const Vector& theta = points[static_cast<std::size_t>(p)];
      const Matrix data_metric =
          model.raw_metric(theta) - model.prior().metric(model.dim());
      const Matrix oracle =
          monte_carlo_metric_oracle(model, theta, options.mc_draws, options.seed + p);
      mc_err = std::max(mc_err, (data_metric - oracle).cwiseAbs().maxCoeff() /
                                    data_metric.cwiseAbs().maxCoeff());
    }
    out.push_back(below(tag + " metric vs Monte-Carlo oracle", mc_err, 0.05,
                        std::to_string(options.mc_draws) + " draws"));
  }

  if (model.kind() == ModelKind::rayleigh) {
    const Vector sigma = Vector::Constant(1, 2.0);
    const Christoffel gamma = christoffel(model.metric(sigma), model.metric_partials(sigma));
    out.push_back(below("rayleigh christoffel at sigma=2 equals -2/sigma = -1",
                        std::abs(gamma(0, 0, 0) + 1.0), 1e-12,
                        format("gamma = %.15g", gamma(0, 0, 0))));
  }
  return out;
}

FpeStudy rayleigh_fpe_study(Eigen::Index n, double sigma_true, std::uint64_t seed,
                            double lo, double hi, double step) {
  const Observations obs = gen_rayleigh(sigma_true, n, seed);
  const double big_n = static_cast<double>(n);
  const double s = obs.values.col(0).squaredNorm();
  // Normaliser of sigma^{-2N} exp(-S / (2 sigma^2)) on (0, inf).
  const double log_z = std::log(0.5) - (big_n - 0.5) * std::log(s / 2.0) +
                       std::lgamma(big_n - 0.5);
  const auto pi = [=](double x) {
    return std::exp(-2.0 * big_n * std::log(x) - s / (2.0 * x * x) - log_z);
  };
  const auto score = [=](double x) { return -2.0 * big_n / x + s / (x * x * x); };
  const auto d = [=](double x) { return x * x / (4.0 * big_n); };
  const auto g = [=](double x) { return 4.0 * big_n / (x * x); };

  const std::vector<double> grid = uniform_grid(lo, hi, step);
  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);

  FpeStudy st;
  // MMALA drift g^-1 dlog(pi) - 1/2 g^-1 gamma with gamma = -2/sigma.
  const auto mmala = [=](double x) { return d(x) * score(x) + d(x) / x; };
  for (double r : fpe_residual_1d(mmala, d, pi, g, grid)) {
    st.mmala_residual = std::max(st.mmala_residual, std::abs(r));
  }

  const auto smm = [=](double x) { return 0.5 * d(x) * score(x); };
  const std::vector<double> r_smm = euclidean_fpe_residual_1d(smm, d, pi, grid);
  for (std::size_t i = 0; i < r_smm.size(); ++i) {
    const double x = grid[i + 1];
    const double d1 = (d(x + h) - d(x - h)) / (2.0 * h);
    const double d2 = (d(x + h) - 2.0 * d(x) + d(x - h)) / (h * h);
    const double p1 = (pi(x + h) - pi(x - h)) / (2.0 * h);
    const double printed = -0.5 * d1 * p1 + 0.5 * pi(x) * d2;
    const double corrected = 0.5 * d1 * p1 + 0.5 * pi(x) * d2;
    st.smm_residual = std::max(st.smm_residual, std::abs(r_smm[i]));
    st.smm_printed_mismatch = std::max(st.smm_printed_mismatch, std::abs(r_smm[i] - printed));
    st.smm_corrected_mismatch =
        std::max(st.smm_corrected_mismatch, std::abs(r_smm[i] - corrected));
  }

  // Constant metric G = 4, standard-normal target.
  const auto normal = [](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  };
  const auto d_const = [](double) { return 0.25; };
  const auto drift_const = [](double x) { return 0.5 * 0.25 * (-x); };
  const std::vector<double> grid_c = uniform_grid(-3.0, 3.0, step);
  const double hc = (grid_c.back() - grid_c.front()) / static_cast<double>(grid_c.size() - 1);
  for (double r : euclidean_fpe_residual_1d(drift_const, d_const, normal, grid_c)) {
    st.constant_residual = std::max(st.constant_residual, std::abs(r));
  }
  for (std::size_t i = 1; i + 1 < grid_c.size(); ++i) {
    const double x = grid_c[i];
    const double d1 = (d_const(x + hc) - d_const(x - hc)) / (2.0 * hc);
    const double d2 = (d_const(x + hc) - 2.0 * d_const(x) + d_const(x - hc)) / (hc * hc);
    const double p1 = (normal(x + hc) - normal(x - hc)) / (2.0 * hc);
    st.constant_expression =
        std::max(st.constant_expression, std::abs(-0.5 * d1 * p1 + 0.5 * normal(x) * d2));
  }
  return st;
}

std::vector<CheckResult> fpe_checks(const FpeStudy& st) {
  std::vector<CheckResult> out;
  out.push_back(below("fpe: mmala drift residual on the manifold equation", st.mmala_residual,
                      1e-3));
  out.push_back(below("fpe: simplified-mmala residual matches the printed expression",
                      st.smm_printed_mismatch, 1e-3,
                      format("corrected expression mismatch %.3g", st.smm_corrected_mismatch)));
  out.push_back(below("fpe: constant-metric simplified residual",
                      std::max(st.constant_residual, st.constant_expression), 1e-6));
  return out;
}

}  // namespace manifold_langevin
