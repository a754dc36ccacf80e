#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "manifold_langevin/geometry.hpp"
#include "manifold_langevin/models.hpp"
#include "manifold_langevin/samplers.hpp"

namespace manifold_langevin {

struct ChainRecord {
  std::vector<Vector> samples;  // K samples, samples[0] is the initial point
  std::vector<bool> accepted;   // K - 1 flags
  double runtime_seconds = 0.0;
  SamplerConfig config;
  std::string model_id;
  std::string method;
};

/// Runs K - 1 chain steps from theta_init. Throws InputError for K < 2 or an
/// initial point outside the support.
ChainRecord run_chain(const TargetModel& model, const SamplerConfig& config,
                      const Vector& theta_init, std::size_t k,
                      std::string method = {});

/// Smallest 1-based index tau such that every sample from tau on satisfies
/// |theta - theta_true|_inf <= rel_tol * max(1, |theta_true|_inf); nullopt if
/// the last sample is outside the tube. Throws InputError for rel_tol <= 0 or
/// a dimension mismatch.
std::optional<std::size_t> detect_warmup(const ChainRecord& chain,
                                         const Vector& theta_true, double rel_tol);

struct ChainStatistics {
  std::optional<std::size_t> warmup;
  double acceptance_percent = 0.0;
  double runtime_seconds = 0.0;
  /// False when warmup is missing or fewer than n_post samples follow it.
  bool sufficient = false;
  Vector mean;
  Vector variance;
  double mean_norm = 0.0;
  double variance_norm = 0.0;
};

/// Mean and unbiased variance over the 1-based samples
/// [warmup + 1, warmup + n_post], and acceptance over all K - 1 steps.
/// Throws InputError when warmup + n_post > K or n_post < 2.
ChainStatistics chain_statistics(const ChainRecord& chain, std::size_t warmup,
                                 std::size_t n_post);

/// Warmup detection followed by chain_statistics when enough samples
/// remain; otherwise only acceptance and runtime are filled in.
ChainStatistics summarize_chain(const ChainRecord& chain, const Vector& theta_true,
                                double rel_tol, std::size_t n_post);

struct Triple {
  double min = 0.0;
  double median = 0.0;  // lower-middle element for even counts
  double max = 0.0;
};

/// Throws InputError for an empty list.
Triple min_median_max(std::vector<double> values);

struct RunReport {
  std::size_t chains = 0;
  std::size_t detected = 0;     // chains with a warmup index
  std::size_t sufficient = 0;   // chains contributing mean/variance
  std::optional<Triple> warmup;
  Triple acceptance_percent;
  Triple runtime_seconds;
  std::vector<Triple> mean;      // per component, over sufficient chains
  std::vector<Triple> variance;
  std::optional<Triple> mean_norm;
  std::optional<Triple> variance_norm;
  std::vector<ChainStatistics> per_chain;
};

/// Min/median/max across chains. Warmup is aggregated over detected chains,
/// mean and variance over chains with sufficient post-warmup samples.
/// Throws InputError for an empty list.
RunReport aggregate_runs(const std::vector<ChainStatistics>& reports);

/// CSV with header iter,accepted,theta_1..theta_d. Row 1 is the initial
/// point with accepted = 1.
void write_trace_csv(const ChainRecord& chain, std::ostream& out);

nlohmann::json to_json(const Triple& t);
nlohmann::json to_json(const ChainStatistics& s);
nlohmann::json to_json(const RunReport& r);

}  // namespace manifold_langevin
