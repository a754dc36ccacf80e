#include "manifold_langevin/chain_runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <string>

#include "manifold_langevin/errors.hpp"

namespace manifold_langevin {

ChainRecord run_chain(const TargetModel& model, const SamplerConfig& config,
                      const Vector& theta_init, std::size_t k, std::string method) {
  if (k < 2) throw InputError("chain length must be at least 2");
  validate(config);

  ChainRecord record;
  record.config = config;
  record.model_id = std::string(to_string(model.kind()));
  record.method = method.empty() ? std::string(to_string(config.variant)) : std::move(method);
  record.samples.reserve(k);
  record.accepted.reserve(k - 1);

  const auto start = std::chrono::steady_clock::now();
  ChainState state = make_chain_state(model, theta_init, config.variant,
                                      expectation_key(config.seed, 0));
  record.samples.push_back(state.theta);
  for (std::size_t i = 1; i < k; ++i) {
    StepResult step = chain_step(model, state, config);
    record.accepted.push_back(step.accepted);
    state = std::move(step.state);
    record.samples.push_back(state.theta);
  }
  record.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

std::optional<std::size_t> detect_warmup(const ChainRecord& chain,
                                         const Vector& theta_true, double rel_tol) {
  if (!(rel_tol > 0.0)) throw InputError("warmup tolerance must be positive");
  const double tube = rel_tol * std::max(1.0, theta_true.cwiseAbs().maxCoeff());
  std::size_t tau = 1;
  for (std::size_t i = 0; i < chain.samples.size(); ++i) {
    const Vector& s = chain.samples[i];
    if (s.size() != theta_true.size()) {
      throw InputError("detect_warmup: sample dimension " + std::to_string(s.size()) +
                       " does not match true parameter dimension " +
                       std::to_string(theta_true.size()));
    }
    if (!((s - theta_true).cwiseAbs().maxCoeff() <= tube)) tau = i + 2;
  }
  if (tau > chain.samples.size()) return std::nullopt;
  return tau;
}

namespace {

double acceptance_percent(const ChainRecord& chain) {
  if (chain.accepted.empty()) return 0.0;
  const auto n = std::count(chain.accepted.begin(), chain.accepted.end(), true);
  return 100.0 * static_cast<double>(n) / static_cast<double>(chain.accepted.size());
}

}  // namespace

ChainStatistics chain_statistics(const ChainRecord& chain, std::size_t warmup,
                                 std::size_t n_post) {
  if (n_post < 2) throw InputError("n_post must be at least 2");
  if (warmup + n_post > chain.samples.size()) {
    throw InputError("insufficient post-warmup samples: warmup " + std::to_string(warmup) +
                     " + n_post " + std::to_string(n_post) + " exceeds chain length " +
                     std::to_string(chain.samples.size()));
  }
  ChainStatistics s;
  s.warmup = warmup;
  s.acceptance_percent = acceptance_percent(chain);
  s.runtime_seconds = chain.runtime_seconds;
  s.sufficient = true;

  // 1-based [warmup + 1, warmup + n_post] is 0-based [warmup, warmup + n_post).
  const Eigen::Index d = chain.samples.front().size();
  s.mean = Vector::Zero(d);
  for (std::size_t i = warmup; i < warmup + n_post; ++i) s.mean += chain.samples[i];
  s.mean /= static_cast<double>(n_post);
  s.variance = Vector::Zero(d);
  for (std::size_t i = warmup; i < warmup + n_post; ++i) {
    s.variance += (chain.samples[i] - s.mean).cwiseAbs2();
  }
  s.variance /= static_cast<double>(n_post - 1);
  s.mean_norm = s.mean.norm();
  s.variance_norm = s.variance.norm();
  return s;
}

ChainStatistics summarize_chain(const ChainRecord& chain, const Vector& theta_true,
                                double rel_tol, std::size_t n_post) {
  const auto warmup = detect_warmup(chain, theta_true, rel_tol);
  if (warmup && n_post >= 2 && *warmup + n_post <= chain.samples.size()) {
    return chain_statistics(chain, *warmup, n_post);
  }
  ChainStatistics s;
  s.warmup = warmup;
  s.acceptance_percent = acceptance_percent(chain);
  s.runtime_seconds = chain.runtime_seconds;
  return s;
}

Triple min_median_max(std::vector<double> values) {
  if (values.empty()) throw InputError("cannot aggregate an empty list");
  std::sort(values.begin(), values.end());
  return Triple{values.front(), values[(values.size() - 1) / 2], values.back()};
}

RunReport aggregate_runs(const std::vector<ChainStatistics>& reports) {
  if (reports.empty()) throw InputError("aggregate_runs: no chain reports");
  RunReport r;
  r.chains = reports.size();
  r.per_chain = reports;

  std::vector<double> warmups, acceptance, runtime, mean_norms, variance_norms;
  std::vector<const ChainStatistics*> usable;
  for (const auto& s : reports) {
    acceptance.push_back(s.acceptance_percent);
    runtime.push_back(s.runtime_seconds);
    if (s.warmup) warmups.push_back(static_cast<double>(*s.warmup));
    if (s.sufficient) {
      usable.push_back(&s);
      mean_norms.push_back(s.mean_norm);
      variance_norms.push_back(s.variance_norm);
    }
  }
  r.detected = warmups.size();
  r.sufficient = usable.size();
  r.acceptance_percent = min_median_max(acceptance);
  r.runtime_seconds = min_median_max(runtime);
  if (!warmups.empty()) r.warmup = min_median_max(warmups);
  if (!usable.empty()) {
    r.mean_norm = min_median_max(mean_norms);
    r.variance_norm = min_median_max(variance_norms);
    const Eigen::Index d = usable.front()->mean.size();
    for (Eigen::Index c = 0; c < d; ++c) {
      std::vector<double> m, v;
      for (const auto* s : usable) {
        m.push_back(s->mean(c));
        v.push_back(s->variance(c));
      }
      r.mean.push_back(min_median_max(m));
      r.variance.push_back(min_median_max(v));
    }
  }
  return r;
}

void write_trace_csv(const ChainRecord& chain, std::ostream& out) {
  const Eigen::Index d = chain.samples.empty() ? 0 : chain.samples.front().size();
  out << "iter,accepted";
  for (Eigen::Index c = 1; c <= d; ++c) out << ",theta_" << c;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < chain.samples.size(); ++i) {
    out << i + 1 << ',' << (i == 0 || chain.accepted[i - 1] ? 1 : 0);
    for (Eigen::Index c = 0; c < d; ++c) out << ',' << chain.samples[i](c);
    out << '\n';
  }
}

namespace {

nlohmann::json vector_json(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

nlohmann::json optional_triple(const std::optional<Triple>& t) {
  return t ? to_json(*t) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const Triple& t) {
  return {{"min", t.min}, {"median", t.median}, {"max", t.max}};
}

nlohmann::json to_json(const ChainStatistics& s) {
  nlohmann::json j;
  j["warmup"] = s.warmup ? nlohmann::json(*s.warmup) : nlohmann::json(nullptr);
  j["acceptance_percent"] = s.acceptance_percent;
  j["runtime_seconds"] = s.runtime_seconds;
  j["sufficient"] = s.sufficient;
  if (s.sufficient) {
    j["mean"] = vector_json(s.mean);
    j["variance"] = vector_json(s.variance);
    j["mean_norm"] = s.mean_norm;
    j["variance_norm"] = s.variance_norm;
  } else {
    j["mean"] = j["variance"] = j["mean_norm"] = j["variance_norm"] = nullptr;
  }
  return j;
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["chains"] = r.chains;
  j["detected"] = r.detected;
  j["sufficient"] = r.sufficient;
  j["warmup"] = optional_triple(r.warmup);
  j["acceptance_percent"] = to_json(r.acceptance_percent);
  j["runtime_seconds"] = to_json(r.runtime_seconds);
  j["mean"] = nlohmann::json::array();
  j["variance"] = nlohmann::json::array();
  for (const auto& t : r.mean) j["mean"].push_back(to_json(t));
  for (const auto& t : r.variance) j["variance"].push_back(to_json(t));
  j["mean_norm"] = optional_triple(r.mean_norm);
  j["variance_norm"] = optional_triple(r.variance_norm);
  j["per_chain"] = nlohmann::json::array();
  for (const auto& s : r.per_chain) j["per_chain"].push_back(to_json(s));
  return j;
}

}  // namespace manifold_langevin
