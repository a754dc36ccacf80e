#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include "manifold_langevin/geometry.hpp"
#include "manifold_langevin/models.hpp"

namespace manifold_langevin {

enum class Variant { gala, mala, mmala, smmala, cmmala, hmc };

std::string_view to_string(Variant v);

/// Throws InputError for unknown names; "nuts" is rejected with a message
/// saying it is out of scope.
Variant parse_variant(std::string_view name);

/// True for variants whose proposal uses the metric.
bool uses_metric(Variant v);

struct SamplerConfig {
  Variant variant = Variant::gala;
  double step_size = 0.1;
  int leapfrog_steps = 1;  // hmc only
  std::uint64_t seed = 0;
  /// Langevin variants only. False drops q_backward / q_forward from the
  /// acceptance ratio; the chain then no longer targets the posterior. Kept
  /// as an ablation for comparing against symmetric-Metropolis results.
  bool proposal_ratio = true;
};

/// Throws InputError for a negative or non-finite step size, or fewer than
/// one leapfrog step for hmc. A zero step size is allowed (identity proposal).
void validate(const SamplerConfig& config);

struct HmcEnergies {
  double current = 0.0;   // H(theta, p) at the start
  double proposed = 0.0;  // H at the end of the trajectory
};

struct ProposalResult {
  Vector proposed;
  double log_q_forward = 0.0;
  double log_q_backward = 0.0;
  std::optional<HmcEnergies> energies;
  /// Proposal left the support (or produced non-finite values); it must be
  /// rejected.
  bool outside_support = false;

  // Quantities at the proposed point, reused as the next state on acceptance.
  double proposed_log_posterior = 0.0;
  Vector proposed_gradient;
  std::optional<MetricBundle> proposed_bundle;
};

/// The state a chain carries between steps. The cached quantities always
/// belong to theta; `iteration` counts completed steps.
struct ChainState {
  Vector theta;
  double log_posterior = 0.0;
  Vector gradient;
  std::optional<MetricBundle> bundle;
  std::uint64_t iteration = 0;
};

/// Builds a state at theta with fresh caches. Throws InputError if theta is
/// outside the model's support.
ChainState make_chain_state(const TargetModel& model, const Vector& theta,
                            Variant variant, std::uint64_t draw_key = 0);

/// Drift per unit time of a Langevin variant:
///   gala   1/2 sqrt(g^-1) grad + c        c = -1/2 g^-1 : gamma
///   mala   1/2 grad
///   mmala  g^-1 grad + c
///   smmala g^-1 grad
///   cmmala 1/2 g^-1 grad + Omega          Omega_i = 1/2 sum_j d(g^-1)_ij / d theta_j
/// bundle is ignored for mala and required otherwise.
Vector langevin_drift(Variant variant, const Vector& gradient,
                      const MetricBundle* bundle);

/// theta' = theta + dt drift(theta) + sqrt(dt) M noise with M = sqrt(g^-1)
/// (identity for mala). log_q_forward and log_q_backward are the Gaussian
/// proposal densities N(theta'; theta + dt drift(theta), dt g^-1(theta)) and
/// N(theta; theta' + dt drift(theta'), dt g^-1(theta')); the metric at
/// theta' is evaluated with draw_key.
ProposalResult langevin_propose(Variant variant, const TargetModel& model,
                                const ChainState& state, double dt,
                                const Vector& noise, std::uint64_t draw_key = 0);

struct LeapfrogResult {
  Vector theta;
  Vector momentum;
  bool finite = true;
};

/// L leapfrog steps for H = -log pi(theta) + |p|^2 / 2 with identity mass.
/// grad_log_pi may throw DomainError, which marks the result non-finite.
LeapfrogResult leapfrog(const std::function<Vector(const Vector&)>& grad_log_pi,
                        Vector theta, Vector momentum, double dt, int steps);

/// Euclidean HMC proposal. Energies are recorded; log_q_forward and
/// log_q_backward hold the kinetic terms -|p0|^2/2 and -|pL|^2/2 so that
/// mh_accept computes exp(H_current - H_proposed).
ProposalResult hmc_propose(const TargetModel& model, const ChainState& state,
                           double dt, int steps, const Vector& momentum);

/// Accept iff log u < min(0, lpp - lpc + lqb - lqf). A proposed log
/// posterior of -inf (or any NaN in the ratio) rejects.
bool mh_accept(double log_post_current, double log_post_proposed,
               double log_q_forward, double log_q_backward, double u);

struct StepResult {
  ChainState state;
  bool accepted = false;
  ProposalResult proposal;
};

/// One Metropolis-Hastings step. Noise, the accept uniform and (for
/// stochastic metrics) the expectation draws are keyed by
/// (config.seed, iteration), so a step is reproducible in isolation.
StepResult chain_step(const TargetModel& model, const ChainState& state,
                      const SamplerConfig& config);

/// Key used for stochastic metric draws at a given step.
std::uint64_t expectation_key(std::uint64_t seed, std::uint64_t iteration);

}  // namespace manifold_langevin
