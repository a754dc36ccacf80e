// Command-line front end: generate observations, run sampler comparisons,
// and run the numerical check suite.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "manifold_langevin/diagnostics.hpp"
#include "manifold_langevin/errors.hpp"
#include "manifold_langevin/experiment.hpp"
#include "manifold_langevin/observations_io.hpp"

namespace fs = std::filesystem;
using namespace manifold_langevin;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitCheck = 3;

unsigned default_threads() {
  if (const char* env = std::getenv("MANIFOLD_LANGEVIN_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    throw InputError("MANIFOLD_LANGEVIN_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Vector parse_list(const std::string& s, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(flag + ": '" + item + "' is not a number");
    }
  }
  if (values.empty()) throw InputError(flag + ": expected a comma-separated list");
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

struct GenerateArgs {
  std::string config;
  std::string model;
  std::string params;
  long long n = -1;
  long long features = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

ExperimentConfig config_from_flags(const GenerateArgs& a) {
  if (a.model.empty()) throw InputError("generate: give --config or --model with --params and --n");
  ExperimentConfig c;
  c.model.kind = parse_model_kind(a.model);
  if (!a.params.empty()) c.model.true_params = parse_list(a.params, "--params");
  c.model.features = static_cast<Eigen::Index>(a.features);
  if (c.model.kind == ModelKind::logistic && c.model.features < 1) {
    throw InputError("generate: logistic regression needs --features");
  }
  if (!c.model.true_params && c.model.kind != ModelKind::logistic) {
    throw InputError("generate: --params is required");
  }
  c.methods.push_back(MethodSpec{});
  return c;
}

int cmd_generate(const GenerateArgs& a) {
  ExperimentConfig c = a.config.empty() ? config_from_flags(a) : load_config(a.config);
  if (a.n >= 0 || a.config.empty()) {
    if (a.n < 1) throw InputError("generate: --n must be at least 1");
    c.data.csv.reset();
    c.data.n = static_cast<Eigen::Index>(a.n);
  }
  if (a.seed) c.data.seed = *a.seed;
  if (c.data.csv) throw InputError("generate: config reads data from a CSV file; nothing to generate");
  const std::uint64_t seed = c.data.seed.value_or(c.seed);
  const Observations obs = resolve_observations(c);

  if (a.out.empty()) {
    write_observations_csv(obs, std::cout, seed);
  } else {
    std::ofstream out(a.out);
    if (!out) throw InputError("cannot write " + a.out);
    write_observations_csv(obs, out, seed);
  }
  std::ostream& info = a.out.empty() ? std::cerr : std::cout;
  info << "N = " << obs.count() << '\n';
  for (Eigen::Index j = 0; j < obs.values.cols(); ++j) {
    const auto col = obs.values.col(j).array();
    const double mean = col.mean();
    const double var = obs.count() > 1
                           ? (col - mean).square().sum() / static_cast<double>(obs.count() - 1)
                           : 0.0;
    info << obs.columns[static_cast<std::size_t>(j)] << ": mean " << mean << ", var " << var
         << '\n';
  }
  return 0;
}

std::string triple_text(const std::optional<Triple>& t, int precision = 4) {
  if (!t) return "-";
  std::ostringstream s;
  s << std::setprecision(precision) << t->min << ", " << t->median << ", " << t->max;
  return s.str();
}

int cmd_run(const std::string& config_path, const std::string& out,
            std::optional<std::uint64_t> seed, std::optional<long long> chains,
            std::optional<long long> threads) {
  ExperimentConfig c = load_config(config_path);
  if (seed) c.seed = *seed;
  if (chains) {
    if (*chains < 1) throw InputError("--chains must be at least 1");
    c.chains = static_cast<std::size_t>(*chains);
  }
  if (threads && *threads < 1) throw InputError("--threads must be at least 1");
  const unsigned n_threads = threads ? static_cast<unsigned>(*threads) : default_threads();
  const fs::path base = fs::path(config_path).parent_path();
  const fs::path out_dir = out.empty() ? fs::path(c.output_dir) : fs::path(out);

  auto model = build_model(c, resolve_observations(c, base));
  const ExperimentResult result = run_experiment(c, *model, n_threads);
  write_experiment_outputs(c, result, out_dir);

  std::cout << c.name << ": " << to_string(c.model.kind) << ", N = " << result.observations
            << ", K = " << c.chain_length << ", chains = " << c.chains << "\n";
  for (const auto& mr : result.methods) {
    const RunReport& r = mr.report;
    std::cout << "  " << std::left << std::setw(7) << to_string(mr.method.variant)
              << " dt=" << mr.method.step_size << (mr.method.proposal_ratio ? "" : " (no q ratio)") << "  acceptance% [" << triple_text(r.acceptance_percent)
              << "]  warmup [" << triple_text(r.warmup) << "] detected " << r.detected << "/"
              << r.chains << "  |mean| [" << triple_text(r.mean_norm) << "]  |var| ["
              << triple_text(r.variance_norm) << "]\n";
  }
  std::cout << "report written to " << (out_dir / "report.json").string() << "\n";
  return 0;
}

int cmd_check(const std::string& config_path, bool corrupt, bool fpe, int draws, int points,
              std::optional<std::uint64_t> seed) {
  ExperimentConfig c;
  fs::path base;
  if (config_path.empty()) {
    c.model.kind = ModelKind::rayleigh;
    c.model.true_params = Vector::Constant(1, 2.0);
    c.data.n = 200;
    c.methods.push_back(MethodSpec{});
  } else {
    c = load_config(config_path);
    base = fs::path(config_path).parent_path();
  }
  if (seed) c.seed = *seed;
  auto model = build_model(c, resolve_observations(c, base));

  CheckOptions opt;
  opt.corrupt_partials = corrupt;
  opt.mc_draws = draws;
  opt.points = points;
  opt.init_box = c.init_box;
  opt.seed = c.seed;
  std::vector<CheckResult> results = run_model_checks(*model, true_parameters(c.model), opt);
  if (fpe) {
    for (auto& r : fpe_checks(rayleigh_fpe_study())) results.push_back(std::move(r));
  }

  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << ": measured "
              << std::setprecision(4) << r.measured << " (tolerance " << r.tolerance << ")";
    if (!r.detail.empty()) std::cout << "  [" << r.detail << "]";
    std::cout << '\n';
  }
  std::cout << (all ? "all checks passed\n" : "some checks failed\n");
  return all ? 0 : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric Langevin samplers on Riemannian parameter manifolds"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic observation CSV");
  generate->add_option("--config", gen.config, "Experiment config (model and data.generate)");
  generate->add_option("--model", gen.model, "Model kind when no config is given");
  generate->add_option("--params", gen.params, "True parameters, comma separated");
  generate->add_option("--n", gen.n, "Number of observations");
  generate->add_option("--features", gen.features, "Feature count D (logistic)");
  generate->add_option("--seed", gen.seed, "Data seed");
  generate->add_option("--out", gen.out, "Output CSV path (default: standard output)");

  std::string run_config, run_out;
  std::optional<std::uint64_t> run_seed;
  std::optional<long long> run_chains, run_threads;
  auto* run = app.add_subcommand("run", "Run every configured method and write traces and a report");
  run->add_option("--config", run_config, "Experiment config")->required();
  run->add_option("--out", run_out, "Output directory (overrides output_dir)");
  run->add_option("--seed", run_seed, "Master seed (overrides config)");
  run->add_option("--chains", run_chains, "Number of chains (overrides config)");
  run->add_option("--threads", run_threads,
                  "Worker threads (default: MANIFOLD_LANGEVIN_THREADS or all cores)");

  std::string check_config;
  bool corrupt = false, fpe = false;
  int draws = 200000, points = 10;
  std::optional<std::uint64_t> check_seed;
  auto* check = app.add_subcommand("check", "Run the numerical consistency checks");
  check->add_option("--config", check_config, "Experiment config (default: Rayleigh, N=200)");
  check->add_flag("--corrupt-partials", corrupt, "Negative control: perturb the metric partials");
  check->add_flag("--fpe", fpe, "Also run the Fokker-Planck residual study");
  check->add_option("--draws", draws, "Monte-Carlo oracle draws")->check(CLI::PositiveNumber);
  check->add_option("--points", points, "Random points per check")->check(CLI::PositiveNumber);
  check->add_option("--seed", check_seed, "Seed (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*run) return cmd_run(run_config, run_out, run_seed, run_chains, run_threads);
    if (*check) return cmd_check(check_config, corrupt, fpe, draws, points, check_seed);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {  // InputError, DimensionError
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
