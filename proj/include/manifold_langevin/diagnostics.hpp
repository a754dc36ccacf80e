#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manifold_langevin/geometry.hpp"
#include "manifold_langevin/models.hpp"

namespace manifold_langevin {

/// Central differences of log_posterior with step fd_step(theta_r).
Vector fd_gradient(const TargetModel& model, const Vector& theta);

/// Central differences of the raw metric, one matrix per coordinate. The
/// draw key is held fixed, so stochastic metrics are differentiated with
/// common random numbers.
std::vector<Matrix> fd_metric_partials(const TargetModel& model, const Vector& theta,
                                       std::uint64_t draw_key = 0);

/// max_k,i,j |a - b| / max(max |a|, floor).
double christoffel_relative_error(const Christoffel& a, const Christoffel& b,
                                  double floor = 1e-300);

/// True iff gamma(k, i, j) == gamma(k, j, i) bit for bit.
bool christoffel_symmetric(const Christoffel& gamma);

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct CheckOptions {
  int points = 10;           // random interior points per check
  int mc_draws = 200000;     // Monte-Carlo metric oracle draws
  int mc_points = 3;
  double init_box = 0.5;     // points drawn from theta* +- init_box |theta*|
  std::uint64_t seed = 1;
  /// Negative control: perturb the analytic metric partials before they are
  /// compared, so the partial and Christoffel checks must fail.
  bool corrupt_partials = false;
};

/// Gradient, metric-partial, Christoffel (symmetry and finite-difference)
/// and Monte-Carlo metric checks for one model.
std::vector<CheckResult> run_model_checks(const TargetModel& model, const Vector& theta_true,
                                          const CheckOptions& options = {});

/// Fokker-Planck residual study on the Rayleigh posterior (N observations
/// at sigma*), plus a constant-metric control with a standard-normal target.
struct FpeStudy {
  double mmala_residual = 0.0;       // max |r| of the MMALA drift, manifold FPE
  double smm_printed_mismatch = 0.0; // max |r_smm - printed expression|
  double smm_corrected_mismatch = 0.0;  // max |r_smm - (+1/2 D' pi' + 1/2 pi D'')|
  double smm_residual = 0.0;         // max |r_smm|
  double constant_residual = 0.0;    // max |r| with G = 4
  double constant_expression = 0.0;  // max |printed expression| with G = 4
};

FpeStudy rayleigh_fpe_study(Eigen::Index n = 20, double sigma_true = 2.0,
                            std::uint64_t seed = 1, double lo = 1.5, double hi = 2.5,
                            double step = 1e-3);

std::vector<CheckResult> fpe_checks(const FpeStudy& study);

}  // namespace manifold_langevin
