#include "manifold_langevin/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "manifold_langevin/data_forge.hpp"
#include "manifold_langevin/errors.hpp"
#include "manifold_langevin/observations_io.hpp"

namespace manifold_langevin {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw InputError("config field '" + field + "': " + why);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) bad_field(path + key, "missing");
  return obj.at(key);
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) bad_field(field, "expected a number");
  return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) bad_field(field, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t seed_value(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const std::int64_t i = integer(v, field);
  if (i < 0) bad_field(field, "must be non-negative");
  return static_cast<std::uint64_t>(i);
}

std::size_t count(const json& v, const std::string& field, std::int64_t min) {
  const std::int64_t i = integer(v, field);
  if (i < min) bad_field(field, "must be at least " + std::to_string(min));
  return static_cast<std::size_t>(i);
}

std::string text(const json& v, const std::string& field) {
  if (!v.is_string()) bad_field(field, "expected a string");
  return v.get<std::string>();
}

Vector vec(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) bad_field(field, "expected a non-empty array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = number(v[i], field + "[" + std::to_string(i) + "]");
  }
  return out;
}

Matrix mat(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) bad_field(field, "expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  Matrix out;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vector row = vec(v[static_cast<std::size_t>(i)], field + "[" + std::to_string(i) + "]");
    if (i == 0) out.resize(rows, row.size());
    if (row.size() != out.cols()) bad_field(field, "rows differ in length");
    out.row(i) = row.transpose();
  }
  return out;
}

json vec_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json mat_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

template <class T>
bool opt_eq(const std::optional<T>& a, const std::optional<T>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  if constexpr (std::is_base_of_v<Eigen::MatrixBase<T>, T>) {
    return a->rows() == b->rows() && a->cols() == b->cols() && *a == *b;
  } else {
    return *a == *b;
  }
}

ModelSpec parse_model(const json& m) {
  const std::string p = "model.";
  ModelSpec s;
  s.kind = parse_model_kind(text(require(m, "kind", p), p + "kind"));
  if (m.contains("true_params")) s.true_params = vec(m["true_params"], p + "true_params");
  if (m.contains("true_mean")) s.true_mean = vec(m["true_mean"], p + "true_mean");
  if (m.contains("true_covariance")) {
    s.true_covariance = mat(m["true_covariance"], p + "true_covariance");
  }
  if (m.contains("prior_lower")) s.prior_lower = vec(m["prior_lower"], p + "prior_lower");
  if (m.contains("prior_upper")) s.prior_upper = vec(m["prior_upper"], p + "prior_upper");
  if (s.prior_lower.has_value() != s.prior_upper.has_value()) {
    bad_field(p + "prior_lower", "prior_lower and prior_upper must be given together");
  }
  if (m.contains("alpha")) s.alpha = number(m["alpha"], p + "alpha");
  if (!(s.alpha > 0.0)) bad_field(p + "alpha", "must be positive");
  if (m.contains("beta_seed")) s.beta_seed = seed_value(m["beta_seed"], p + "beta_seed");
  if (m.contains("features")) {
    s.features = static_cast<Eigen::Index>(count(m["features"], p + "features", 1));
  }
  if (m.contains("feature_low")) s.feature_low = number(m["feature_low"], p + "feature_low");
  if (m.contains("feature_high")) s.feature_high = number(m["feature_high"], p + "feature_high");
  if (!(s.feature_low < s.feature_high)) bad_field(p + "feature_low", "must be below feature_high");
  if (m.contains("expectation_draws")) {
    s.expectation_draws =
        static_cast<int>(count(m["expectation_draws"], p + "expectation_draws", 1));
  }
  if (m.contains("metric")) {
    const std::string form = text(m["metric"], p + "metric");
    if (form == "exact") {
      s.banana_metric = BananaMetric::exact;
    } else if (form == "printed") {
      s.banana_metric = BananaMetric::printed;
    } else {
      bad_field(p + "metric", "expected \"exact\" or \"printed\"");
    }
  }

  switch (s.kind) {
    case ModelKind::gaussian:
      if (s.true_params) break;
      if (!s.true_mean || !s.true_covariance) {
        bad_field(p + "true_mean", "gaussian needs true_mean and true_covariance (or true_params)");
      }
      break;
    case ModelKind::logistic:
      if (s.features < 1) bad_field(p + "features", "logistic needs the feature count D");
      if (s.true_params && s.true_params->size() != s.features + 1) {
        bad_field(p + "true_params", "logistic needs D + 1 coefficients");
      }
      break;
    default:
      if (!s.true_params) bad_field(p + "true_params", "missing");
  }
  return s;
}

json model_json(const ModelSpec& s) {
  json m;
  m["kind"] = std::string(to_string(s.kind));
  if (s.true_params) m["true_params"] = vec_json(*s.true_params);
  if (s.true_mean) m["true_mean"] = vec_json(*s.true_mean);
  if (s.true_covariance) m["true_covariance"] = mat_json(*s.true_covariance);
  if (s.prior_lower) m["prior_lower"] = vec_json(*s.prior_lower);
  if (s.prior_upper) m["prior_upper"] = vec_json(*s.prior_upper);
  switch (s.kind) {
    case ModelKind::logistic:
      m["alpha"] = s.alpha;
      m["beta_seed"] = s.beta_seed;
      m["features"] = s.features;
      m["feature_low"] = s.feature_low;
      m["feature_high"] = s.feature_high;
      break;
    case ModelKind::weibull:
      m["expectation_draws"] = s.expectation_draws;
      break;
    case ModelKind::banana:
      m["metric"] = s.banana_metric == BananaMetric::exact ? "exact" : "printed";
      break;
    default:
      break;
  }
  return m;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw InputError("config: top level must be a JSON object");
  ExperimentConfig c;
  if (doc.contains("name")) c.name = text(doc["name"], "name");
  c.model = parse_model(require(doc, "model", ""));

  const json& data = require(doc, "data", "");
  if (data.contains("csv")) {
    c.data.csv = text(data["csv"], "data.csv");
  } else if (data.contains("generate")) {
    const json& g = data["generate"];
    c.data.n = static_cast<Eigen::Index>(count(require(g, "n", "data.generate."), "data.generate.n", 1));
    if (g.contains("seed")) c.data.seed = seed_value(g["seed"], "data.generate.seed");
  } else {
    bad_field("data", "expected either \"csv\" or \"generate\"");
  }

  const json& methods = require(doc, "methods", "");
  if (!methods.is_array() || methods.empty()) bad_field("methods", "expected a non-empty array");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const std::string p = "methods[" + std::to_string(i) + "].";
    const json& m = methods[i];
    MethodSpec spec;
    try {
      spec.variant = parse_variant(text(require(m, "name", p), p + "name"));
    } catch (const InputError& e) {
      bad_field(p + "name", e.what());
    }
    spec.step_size = number(require(m, "step_size", p), p + "step_size");
    if (!(spec.step_size >= 0.0)) bad_field(p + "step_size", "must be non-negative");
    if (m.contains("leapfrog_steps")) {
      spec.leapfrog_steps = static_cast<int>(count(m["leapfrog_steps"], p + "leapfrog_steps", 1));
    } else if (spec.variant == Variant::hmc) {
      bad_field(p + "leapfrog_steps", "required for hmc");
    }
    if (m.contains("proposal_ratio")) {
      if (!m["proposal_ratio"].is_boolean()) bad_field(p + "proposal_ratio", "expected a boolean");
      spec.proposal_ratio = m["proposal_ratio"].get<bool>();
    }
    c.methods.push_back(spec);
  }

  if (doc.contains("chain_length")) c.chain_length = count(doc["chain_length"], "chain_length", 2);
  if (doc.contains("chains")) c.chains = count(doc["chains"], "chains", 1);
  if (doc.contains("warmup_rel_tol")) {
    c.warmup_rel_tol = number(doc["warmup_rel_tol"], "warmup_rel_tol");
    if (!(c.warmup_rel_tol > 0.0)) bad_field("warmup_rel_tol", "must be positive");
  }
  if (doc.contains("n_post")) c.n_post = count(doc["n_post"], "n_post", 2);
  if (doc.contains("init_box")) {
    c.init_box = number(doc["init_box"], "init_box");
    if (!(c.init_box >= 0.0)) bad_field("init_box", "must be non-negative");
  }
  if (doc.contains("output_dir")) c.output_dir = text(doc["output_dir"], "output_dir");
  if (doc.contains("seed")) c.seed = seed_value(doc["seed"], "seed");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["name"] = c.name;
  doc["model"] = model_json(c.model);
  if (c.data.csv) {
    doc["data"] = {{"csv", *c.data.csv}};
  } else {
    json g = {{"n", c.data.n}};
    if (c.data.seed) g["seed"] = *c.data.seed;
    doc["data"] = {{"generate", g}};
  }
  doc["methods"] = json::array();
  for (const auto& m : c.methods) {
    json j = {{"name", std::string(to_string(m.variant))}, {"step_size", m.step_size}};
    if (m.variant == Variant::hmc) j["leapfrog_steps"] = m.leapfrog_steps;
    if (!m.proposal_ratio) j["proposal_ratio"] = false;
    doc["methods"].push_back(j);
  }
  doc["chain_length"] = c.chain_length;
  doc["chains"] = c.chains;
  doc["warmup_rel_tol"] = c.warmup_rel_tol;
  doc["n_post"] = c.n_post;
  doc["init_box"] = c.init_box;
  doc["output_dir"] = c.output_dir;
  doc["seed"] = c.seed;
  return doc;
}

bool operator==(const ModelSpec& a, const ModelSpec& b) {
  return a.kind == b.kind && opt_eq(a.true_params, b.true_params) &&
         opt_eq(a.true_mean, b.true_mean) && opt_eq(a.true_covariance, b.true_covariance) &&
         opt_eq(a.prior_lower, b.prior_lower) && opt_eq(a.prior_upper, b.prior_upper) &&
         a.alpha == b.alpha && a.beta_seed == b.beta_seed && a.features == b.features &&
         a.feature_low == b.feature_low && a.feature_high == b.feature_high &&
         a.expectation_draws == b.expectation_draws && a.banana_metric == b.banana_metric;
}

bool operator==(const DataSource& a, const DataSource& b) {
  return a.csv == b.csv && a.n == b.n && a.seed == b.seed;
}

bool operator==(const MethodSpec& a, const MethodSpec& b) {
  return a.variant == b.variant && a.step_size == b.step_size &&
         (a.variant != Variant::hmc || a.leapfrog_steps == b.leapfrog_steps) &&
         a.proposal_ratio == b.proposal_ratio;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.name == b.name && a.model == b.model && a.data == b.data &&
         a.methods == b.methods && a.chain_length == b.chain_length &&
         a.chains == b.chains && a.warmup_rel_tol == b.warmup_rel_tol &&
         a.n_post == b.n_post && a.init_box == b.init_box &&
         a.output_dir == b.output_dir && a.seed == b.seed;
}

Vector true_parameters(const ModelSpec& spec) {
  if (spec.true_params) return *spec.true_params;
  if (spec.kind == ModelKind::gaussian) {
    const GaussianParamIndex index(spec.true_mean->size());
    return index.to_theta(*spec.true_mean, *spec.true_covariance);
  }
  if (spec.kind == ModelKind::logistic) return logreg_benchmark_beta(spec.features, spec.beta_seed);
  throw InputError("config field 'model.true_params': missing");
}

Observations resolve_observations(const ExperimentConfig& config,
                                  const std::filesystem::path& base_dir) {
  if (config.data.csv) {
    std::filesystem::path p(*config.data.csv);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return read_observations_csv(p);
  }
  const Vector theta = true_parameters(config.model);
  const Eigen::Index n = config.data.n;
  const std::uint64_t seed = config.data.seed.value_or(config.seed);
  const auto need = [&](Eigen::Index d) {
    if (theta.size() != d) {
      bad_field("model.true_params", "expected " + std::to_string(d) + " values");
    }
  };
  switch (config.model.kind) {
    case ModelKind::rayleigh:
      need(1);
      return gen_rayleigh(theta(0), n, seed);
    case ModelKind::banana:
      need(1);
      return gen_banana(theta(0), n, seed);
    case ModelKind::weibull:
      need(2);
      return gen_weibull(theta(0), theta(1), n, seed);
    case ModelKind::gaussian: {
      const GaussianParamIndex index(GaussianParamIndex::data_dim_for(theta.size()));
      return gen_mvn(index.mean(theta), index.covariance(theta), n, seed);
    }
    case ModelKind::logistic:
      return gen_logreg(theta, n, config.model.features, config.model.feature_low,
                        config.model.feature_high, seed);
  }
  throw InputError("unknown model kind");
}

std::unique_ptr<TargetModel> build_model(const ExperimentConfig& config, Observations obs) {
  ModelOptions options;
  if (config.model.prior_lower) {
    options.prior = Prior::uniform(*config.model.prior_lower, *config.model.prior_upper);
  }
  options.logistic_alpha = config.model.alpha;
  options.weibull_expectation_draws = config.model.expectation_draws;
  options.weibull_expectation_seed = config.seed;
  options.banana_metric = config.model.banana_metric;
  auto model = make_model(config.model.kind, std::move(obs), options);
  if (true_parameters(config.model).size() != model->dim()) {
    bad_field("model.true_params", "length does not match the model dimension " +
                                       std::to_string(model->dim()));
  }
  return model;
}

std::uint64_t chain_seed(std::uint64_t master_seed, std::size_t chain) {
  return derive_key({master_seed, static_cast<std::uint64_t>(Stream::noise), chain});
}

Vector initial_point(const TargetModel& model, const Vector& theta_true,
                     double init_box, std::uint64_t master_seed, std::size_t chain) {
  const Vector half = (init_box * theta_true.cwiseAbs())
                          .unaryExpr([init_box](double h) { return h > 0.0 ? h : init_box; });
  for (std::uint64_t attempt = 0; attempt < 10000; ++attempt) {
    CounterRng rng(derive_key(
        {master_seed, static_cast<std::uint64_t>(Stream::init), chain, attempt}));
    Vector theta(theta_true.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      theta(i) = theta_true(i) + half(i) * (2.0 * rng.uniform() - 1.0);
    }
    if (model.in_support(theta)) return theta;
  }
  throw InputError("could not draw an initial point inside the support; shrink init_box");
}

ExperimentResult run_experiment(const ExperimentConfig& config, const TargetModel& model,
                                unsigned threads) {
  ExperimentResult result;
  result.theta_true = true_parameters(config.model);
  result.observations = model.observation_count();

  std::vector<Vector> inits;
  for (std::size_t c = 0; c < config.chains; ++c) {
    inits.push_back(initial_point(model, result.theta_true, config.init_box, config.seed, c));
  }
  for (const auto& m : config.methods) {
    MethodResult mr;
    mr.method = m;
    mr.chains.resize(config.chains);
    result.methods.push_back(std::move(mr));
  }

  const std::size_t jobs = config.methods.size() * config.chains;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t mi = job / config.chains;
      const std::size_t ci = job % config.chains;
      try {
        const MethodSpec& m = config.methods[mi];
        SamplerConfig sc{m.variant, m.step_size, m.leapfrog_steps, chain_seed(config.seed, ci),
                         m.proposal_ratio};
        result.methods[mi].chains[ci] =
            run_chain(model, sc, inits[ci], config.chain_length);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs;
      }
    }
  };
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), jobs));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  for (auto& mr : result.methods) {
    std::vector<ChainStatistics> stats;
    for (const auto& chain : mr.chains) {
      stats.push_back(summarize_chain(chain, result.theta_true, config.warmup_rel_tol,
                                      config.n_post));
    }
    mr.report = aggregate_runs(stats);
  }
  return result;
}

json report_json(const ExperimentConfig& config, const ExperimentResult& result) {
  json doc;
  doc["name"] = config.name;
  doc["model"] = std::string(to_string(config.model.kind));
  doc["true_params"] = vec_json(result.theta_true);
  doc["observations"] = result.observations;
  doc["chain_length"] = config.chain_length;
  doc["warmup_rel_tol"] = config.warmup_rel_tol;
  doc["n_post"] = config.n_post;
  doc["seed"] = config.seed;
  doc["methods"] = json::array();
  for (const auto& mr : result.methods) {
    json m = to_json(mr.report);
    m["method"] = std::string(to_string(mr.method.variant));
    m["step_size"] = mr.method.step_size;
    if (mr.method.variant == Variant::hmc) m["leapfrog_steps"] = mr.method.leapfrog_steps;
    m["proposal_ratio"] = mr.method.proposal_ratio;
    doc["methods"].push_back(std::move(m));
  }
  return doc;
}

void write_experiment_outputs(const ExperimentConfig& config,
                              const ExperimentResult& result,
                              const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw InputError("cannot create output directory " + out_dir.string());
  for (std::size_t mi = 0; mi < result.methods.size(); ++mi) {
    const auto& mr = result.methods[mi];
    // Methods may repeat with different step sizes; keep their traces apart.
    std::string dir_name(to_string(mr.method.variant));
    for (std::size_t j = 0; j < mi; ++j) {
      if (result.methods[j].method.variant == mr.method.variant) {
        dir_name += "_" + std::to_string(mi + 1);
        break;
      }
    }
    const fs::path dir = out_dir / dir_name;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir.string());
    for (std::size_t ci = 0; ci < mr.chains.size(); ++ci) {
      const fs::path file = dir / ("chain_" + std::to_string(ci + 1) + ".csv");
      std::ofstream out(file);
      if (!out) throw InputError("cannot write " + file.string());
      write_trace_csv(mr.chains[ci], out);
    }
  }
  std::ofstream out(out_dir / "report.json");
  if (!out) throw InputError("cannot write " + (out_dir / "report.json").string());
  out << report_json(config, result).dump(2) << '\n';
}

}  // namespace manifold_langevin
