#include "manifold_langevin/samplers.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "manifold_langevin/errors.hpp"

namespace manifold_langevin {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_isotropic_density(const Vector& x, const Vector& mean, double variance) {
  const double d = static_cast<double>(x.size());
  return -0.5 * ((x - mean).squaredNorm() / variance +
                 d * std::log(2.0 * std::numbers::pi * variance));
}

double log_proposal_density(Variant variant, const Vector& x, const Vector& mean,
                            const MetricBundle* bundle, double dt) {
  if (variant == Variant::mala) return log_isotropic_density(x, mean, dt);
  return log_gaussian_density_precision(x, mean, bundle->metric, dt);
}

Vector standard_normals(std::uint64_t key, Eigen::Index d) {
  CounterRng rng(key);
  Vector z(d);
  for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.normal();
  return z;
}

ProposalResult rejected(Vector proposed) {
  ProposalResult r;
  r.proposed = std::move(proposed);
  r.outside_support = true;
  r.proposed_log_posterior = kNegInf;
  return r;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::gala: return "gala";
    case Variant::mala: return "mala";
    case Variant::mmala: return "mmala";
    case Variant::smmala: return "smmala";
    case Variant::cmmala: return "cmmala";
    case Variant::hmc: return "hmc";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "gala") return Variant::gala;
  if (name == "mala") return Variant::mala;
  if (name == "mmala") return Variant::mmala;
  if (name == "smmala") return Variant::smmala;
  if (name == "cmmala") return Variant::cmmala;
  if (name == "hmc") return Variant::hmc;
  if (name == "nuts") {
    throw InputError("method 'nuts' is out of scope: only gala, mala, mmala, smmala, "
                     "cmmala and hmc are implemented");
  }
  throw InputError("unknown method '" + std::string(name) +
                   "' (expected gala, mala, mmala, smmala, cmmala or hmc)");
}

bool uses_metric(Variant v) { return v != Variant::mala && v != Variant::hmc; }

void validate(const SamplerConfig& config) {
  if (!(config.step_size >= 0.0) || !std::isfinite(config.step_size)) {
    throw InputError("step_size must be a finite non-negative number");
  }
  if (config.variant == Variant::hmc && config.leapfrog_steps < 1) {
    throw InputError("leapfrog_steps must be at least 1 for hmc");
  }
}

std::uint64_t expectation_key(std::uint64_t seed, std::uint64_t iteration) {
  return derive_key({seed, static_cast<std::uint64_t>(Stream::expectation), iteration});
}

ChainState make_chain_state(const TargetModel& model, const Vector& theta,
                            Variant variant, std::uint64_t draw_key) {
  if (theta.size() != model.dim()) {
    throw InputError("initial point has length " + std::to_string(theta.size()) +
                     ", model dimension is " + std::to_string(model.dim()));
  }
  if (!model.in_support(theta)) {
    throw InputError("initial point lies outside the model's support");
  }
  ChainState s;
  s.theta = theta;
  s.log_posterior = model.log_posterior(theta);
  s.gradient = model.gradient(theta);
  if (uses_metric(variant)) s.bundle = model.metric_bundle(theta, draw_key);
  return s;
}

Vector langevin_drift(Variant variant, const Vector& gradient,
                      const MetricBundle* bundle) {
  if (variant == Variant::mala) return 0.5 * gradient;
  if (bundle == nullptr) {
    throw InputError(std::string(to_string(variant)) + " needs a metric bundle");
  }
  const Matrix& g_inv = bundle->inverse.matrix();
  switch (variant) {
    case Variant::gala:
      return 0.5 * bundle->sqrt_inverse * gradient +
             connection_drift(bundle->inverse, christoffel(bundle->metric, bundle->partials));
    case Variant::mmala:
      return g_inv * gradient +
             connection_drift(bundle->inverse, christoffel(bundle->metric, bundle->partials));
    case Variant::smmala:
      return g_inv * gradient;
    case Variant::cmmala:
      return 0.5 * g_inv * gradient +
             inverse_metric_divergence(bundle->inverse, bundle->partials);
    default:
      throw InputError("langevin_drift: hmc is not a Langevin variant");
  }
}

ProposalResult langevin_propose(Variant variant, const TargetModel& model,
                                const ChainState& state, double dt,
                                const Vector& noise, std::uint64_t draw_key) {
  if (variant == Variant::hmc) {
    throw InputError("langevin_propose: hmc is not a Langevin variant");
  }
  if (noise.size() != state.theta.size()) {
    throw DimensionError("langevin_propose: noise dimension mismatch");
  }
  const bool metric = uses_metric(variant);
  if (metric && !state.bundle) {
    throw InputError("langevin_propose: state has no metric bundle");
  }
  const MetricBundle* cur = metric ? &*state.bundle : nullptr;

  const Vector mean = state.theta + dt * langevin_drift(variant, state.gradient, cur);
  const Vector step = metric ? Vector(cur->sqrt_inverse * noise) : noise;
  Vector proposed = mean + std::sqrt(dt) * step;

  if (!proposed.allFinite() || !model.in_support(proposed)) return rejected(std::move(proposed));
  const double lp = model.log_posterior(proposed);
  if (lp == kNegInf) return rejected(std::move(proposed));

  ProposalResult r;
  r.proposed_log_posterior = lp;
  r.proposed_gradient = model.gradient(proposed);
  if (metric) r.proposed_bundle = model.metric_bundle(proposed, draw_key);
  const MetricBundle* next = metric ? &*r.proposed_bundle : nullptr;

  if (dt > 0.0) {
    const Vector back_mean = proposed + dt * langevin_drift(variant, r.proposed_gradient, next);
    r.log_q_forward = log_proposal_density(variant, proposed, mean, cur, dt);
    r.log_q_backward = log_proposal_density(variant, state.theta, back_mean, next, dt);
  }
  r.proposed = std::move(proposed);
  return r;
}

LeapfrogResult leapfrog(const std::function<Vector(const Vector&)>& grad_log_pi,
                        Vector theta, Vector momentum, double dt, int steps) {
  LeapfrogResult out;
  try {
    momentum += 0.5 * dt * grad_log_pi(theta);
    for (int l = 1; l <= steps; ++l) {
      theta += dt * momentum;
      if (!theta.allFinite()) {
        out.finite = false;
        break;
      }
      const Vector g = grad_log_pi(theta);
      momentum += (l < steps ? dt : 0.5 * dt) * g;
    }
  } catch (const DomainError&) {
    out.finite = false;
  }
  out.finite = out.finite && theta.allFinite() && momentum.allFinite();
  out.theta = std::move(theta);
  out.momentum = std::move(momentum);
  return out;
}

ProposalResult hmc_propose(const TargetModel& model, const ChainState& state,
                           double dt, int steps, const Vector& momentum) {
  if (steps < 1) throw InputError("hmc_propose: leapfrog steps must be at least 1");
  if (momentum.size() != state.theta.size()) {
    throw DimensionError("hmc_propose: momentum dimension mismatch");
  }
  const auto grad = [&model](const Vector& t) {
    if (!model.in_support(t)) throw DomainError("trajectory left the support");
    return model.gradient(t);
  };
  LeapfrogResult lf = leapfrog(grad, state.theta, momentum, dt, steps);
  if (!lf.finite || !model.in_support(lf.theta)) return rejected(std::move(lf.theta));
  const double lp = model.log_posterior(lf.theta);
  if (!std::isfinite(lp)) return rejected(std::move(lf.theta));

  ProposalResult r;
  r.proposed_log_posterior = lp;
  r.proposed_gradient = model.gradient(lf.theta);
  r.log_q_forward = -0.5 * momentum.squaredNorm();
  r.log_q_backward = -0.5 * lf.momentum.squaredNorm();
  r.energies = HmcEnergies{-state.log_posterior - r.log_q_forward, -lp - r.log_q_backward};
  r.proposed = std::move(lf.theta);
  return r;
}

bool mh_accept(double log_post_current, double log_post_proposed,
               double log_q_forward, double log_q_backward, double u) {
  if (std::isnan(log_post_proposed) || log_post_proposed == kNegInf) return false;
  const double log_ratio =
      log_post_proposed - log_post_current + log_q_backward - log_q_forward;
  if (std::isnan(log_ratio)) return false;
  return std::log(u) < std::min(0.0, log_ratio);
}

StepResult chain_step(const TargetModel& model, const ChainState& state,
                      const SamplerConfig& config) {
  validate(config);
  const std::uint64_t it = state.iteration + 1;
  const Eigen::Index d = state.theta.size();

  StepResult out;
  if (config.step_size == 0.0) {
    out.state = state;
    out.state.iteration = it;
    out.accepted = true;
    out.proposal.proposed = state.theta;
    out.proposal.proposed_log_posterior = state.log_posterior;
    out.proposal.proposed_gradient = state.gradient;
    out.proposal.proposed_bundle = state.bundle;
    return out;
  }

  const std::uint64_t draw_key = expectation_key(config.seed, it);
  const Vector noise = standard_normals(
      derive_key({config.seed, static_cast<std::uint64_t>(Stream::noise), it}), d);

  ChainState current = state;
  if (uses_metric(config.variant) &&
      (model.stochastic_metric() || !current.bundle)) {
    current.bundle = model.metric_bundle(current.theta, draw_key);
  }

  out.proposal =
      config.variant == Variant::hmc
          ? hmc_propose(model, current, config.step_size, config.leapfrog_steps, noise)
          : langevin_propose(config.variant, model, current, config.step_size, noise,
                             draw_key);

  CounterRng accept_rng(
      derive_key({config.seed, static_cast<std::uint64_t>(Stream::accept), it}));
  const double u = accept_rng.uniform();
  const bool ratio = config.proposal_ratio || config.variant == Variant::hmc;
  out.accepted = !out.proposal.outside_support &&
                 mh_accept(current.log_posterior, out.proposal.proposed_log_posterior,
                           ratio ? out.proposal.log_q_forward : 0.0,
                           ratio ? out.proposal.log_q_backward : 0.0, u);

  if (out.accepted) {
    out.state.theta = out.proposal.proposed;
    out.state.log_posterior = out.proposal.proposed_log_posterior;
    out.state.gradient = out.proposal.proposed_gradient;
    out.state.bundle = out.proposal.proposed_bundle;
  } else {
    out.state = std::move(current);
  }
  out.state.iteration = it;
  return out;
}

}  // namespace manifold_langevin
