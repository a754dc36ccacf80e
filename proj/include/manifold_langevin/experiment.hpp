#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "manifold_langevin/chain_runner.hpp"
#include "manifold_langevin/models.hpp"
#include "manifold_langevin/samplers.hpp"

namespace manifold_langevin {

struct ModelSpec {
  ModelKind kind = ModelKind::rayleigh;
  /// Flat true parameter vector. Optional only for logistic regression,
  /// where beta_seed then generates one.
  std::optional<Vector> true_params;
  /// Gaussian only: the true parameters given as mean and covariance.
  std::optional<Vector> true_mean;
  std::optional<Matrix> true_covariance;
  std::optional<Vector> prior_lower;
  std::optional<Vector> prior_upper;
  double alpha = 100.0;                         // logistic
  std::uint64_t beta_seed = 0;                  // logistic
  Eigen::Index features = 0;                    // logistic D
  double feature_low = -1.0;                    // logistic
  double feature_high = 1.0;                    // logistic
  int expectation_draws = 2000;                 // weibull
  BananaMetric banana_metric = BananaMetric::exact;
};

struct DataSource {
  std::optional<std::string> csv;  // relative paths resolve against the config file
  Eigen::Index n = 0;              // generate
  std::optional<std::uint64_t> seed;  // generate; defaults to the master seed
};

struct MethodSpec {
  Variant variant = Variant::gala;
  double step_size = 0.1;
  int leapfrog_steps = 1;
  bool proposal_ratio = true;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ModelSpec model;
  DataSource data;
  std::vector<MethodSpec> methods;
  std::size_t chain_length = 2000;
  std::size_t chains = 10;
  double warmup_rel_tol = 0.05;
  std::size_t n_post = 1000;
  double init_box = 0.5;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
};

/// Parses and validates a config document. Errors are InputError messages
/// naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Emits every field, so parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);

bool operator==(const ModelSpec& a, const ModelSpec& b);
bool operator==(const DataSource& a, const DataSource& b);
bool operator==(const MethodSpec& a, const MethodSpec& b);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Resolved true parameter vector theta*.
Vector true_parameters(const ModelSpec& spec);

/// Observations from the configured CSV (resolved against base_dir) or
/// generated at theta* with the configured seed.
Observations resolve_observations(const ExperimentConfig& config,
                                  const std::filesystem::path& base_dir = {});

std::unique_ptr<TargetModel> build_model(const ExperimentConfig& config,
                                         Observations obs);

/// Initial point for one chain: uniform in theta* +- init_box |theta*|
/// (half-width init_box where theta*_i = 0), resampled until it lies in the
/// support. Depends only on (master seed, chain index), so every method
/// starts chain i from the same point.
Vector initial_point(const TargetModel& model, const Vector& theta_true,
                     double init_box, std::uint64_t master_seed, std::size_t chain);

/// Per-chain sampler seed shared by all methods (paired noise streams).
std::uint64_t chain_seed(std::uint64_t master_seed, std::size_t chain);

struct MethodResult {
  MethodSpec method;
  std::vector<ChainRecord> chains;
  RunReport report;
};

struct ExperimentResult {
  Vector theta_true;
  Eigen::Index observations = 0;
  std::vector<MethodResult> methods;
};

/// Runs every (method, chain) pair on up to `threads` worker threads.
/// Results do not depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, const TargetModel& model,
                                unsigned threads = 1);

/// Writes <out>/<method>/chain_<i>.csv traces and <out>/report.json.
void write_experiment_outputs(const ExperimentConfig& config,
                              const ExperimentResult& result,
                              const std::filesystem::path& out_dir);

nlohmann::json report_json(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace manifold_langevin
