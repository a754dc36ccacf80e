// Prints one PASS/FAIL line per acceptance criterion with the measured
// values. Exits non-zero if any gated line fails. INFO lines are not gated.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "manifold_langevin/chain_runner.hpp"
#include "manifold_langevin/data_forge.hpp"
#include "manifold_langevin/diagnostics.hpp"
#include "manifold_langevin/experiment.hpp"
#include "manifold_langevin/fokker_planck.hpp"
#include "manifold_langevin/models.hpp"
#include "manifold_langevin/samplers.hpp"

using namespace manifold_langevin;

namespace {

const std::filesystem::path kPresets = std::filesystem::path(ML_SOURCE_DIR) / "presets";

int failures = 0;

void line(const std::string& id, bool pass, const std::string& what) {
  std::printf("%s  %-3s %s\n", pass ? "PASS" : "FAIL", id.c_str(), what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(const std::string& id, const std::string& what) {
  std::printf("INFO  %-3s %s\n", id.c_str(), what.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string fmt(const std::optional<Triple>& t) {
  return t ? fmt(t->median) : std::string("n/a");
}

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Loaded {
  ExperimentConfig config;
  std::unique_ptr<TargetModel> model;
  Vector truth;
};

Loaded load(const std::string& preset) {
  Loaded l;
  l.config = load_config(kPresets / preset);
  l.model = build_model(l.config, resolve_observations(l.config, kPresets));
  l.truth = true_parameters(l.config.model);
  return l;
}

const MethodResult& method(const ExperimentResult& r, Variant v) {
  for (const auto& m : r.methods)
    if (m.method.variant == v) return m;
  throw std::runtime_error("method missing from preset");
}

const CheckResult* find_check(const std::vector<CheckResult>& rs, const std::string& suffix) {
  for (const auto& r : rs)
    if (r.name.size() >= suffix.size() &&
        r.name.compare(r.name.size() - suffix.size(), suffix.size(), suffix) == 0)
      return &r;
  return nullptr;
}

// Median over chains with sufficient post-warmup samples of one component.
std::optional<double> median_component(const RunReport& r, std::vector<Triple> RunReport::*field,
                                       std::size_t c) {
  const auto& v = r.*field;
  if (c >= v.size()) return std::nullopt;
  return v[c].median;
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("n/a"); }

// --- property criteria -----------------------------------------------------

void criterion_1() {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> sig(0.8, 4.0), true_sig(1.0, 3.0);
  std::uniform_int_distribution<int> count(5, 400);
  double worst_drift = 0.0, worst_noise = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = count(gen);
    const RayleighModel m(gen_rayleigh(true_sig(gen), n, 1000 + static_cast<std::uint64_t>(trial)));
    const double s = sig(gen);
    const Vector theta = Vector::Constant(1, s);
    const MetricBundle b = m.metric_bundle(theta);
    const double drift = langevin_drift(Variant::gala, m.gradient(theta), &b)(0);
    const double rn = std::sqrt(static_cast<double>(n));
    const double want = -rn / 2 + m.sum_of_squares() / (4 * s * s * rn) + s / (4.0 * n);
    const double noise = s / (2 * rn);
    worst_drift = std::max(worst_drift, std::abs(drift - want) / std::max(std::abs(want), 1e-300));
    worst_noise = std::max(worst_noise, std::abs(b.sqrt_inverse(0, 0) - noise) / noise);
  }
  line("1", worst_drift <= 1e-12 && worst_noise <= 1e-12,
       "rayleigh gala drift/noise vs developed closed form at 50 pairs: max rel err drift " +
           fmt(worst_drift) + ", noise " + fmt(worst_noise) + " (tol 1e-12)");
}

struct ModelChecks {
  std::string name;
  std::vector<CheckResult> results;
  Loaded loaded;
};

std::vector<ModelChecks> model_checks() {
  std::vector<ModelChecks> out;
  for (const char* preset : {"rayleigh_table1.json", "banana_table1.json", "weibull_table2.json",
                             "gaussian_5param.json", "logreg_10d.json"}) {
    ModelChecks mc;
    mc.loaded = load(preset);
    mc.name = std::string(to_string(mc.loaded.model->kind()));
    CheckOptions o;
    o.points = 20;
    o.mc_draws = 200000;
    mc.results = run_model_checks(*mc.loaded.model, mc.loaded.truth, o);
    out.push_back(std::move(mc));
  }
  return out;
}

void gated_from_checks(const std::string& id, const std::vector<ModelChecks>& all,
                       const std::string& suffix, const std::vector<std::string>& models,
                       const std::string& title) {
  bool pass = true;
  std::string detail;
  for (const auto& mc : all) {
    if (std::find(models.begin(), models.end(), mc.name) == models.end()) continue;
    const CheckResult* r = find_check(mc.results, suffix);
    if (!r) {
      pass = false;
      detail += " " + mc.name + "=missing";
      continue;
    }
    pass = pass && r->passed;
    detail += " " + mc.name + "=" + fmt(r->measured);
  }
  const CheckResult* any = find_check(all.front().results, suffix);
  line(id, pass, title + ":" + detail + (any ? " (tol " + fmt(any->tolerance) + ")" : ""));
}

void criterion_4_symmetry_sweep(const std::vector<ModelChecks>& all) {
  // 100 random interior points per model, bit-exact symmetry
  bool sym = true;
  for (const auto& mc : all) {
    const auto& l = mc.loaded;
    for (std::size_t i = 0; i < 100; ++i) {
      const Vector p = initial_point(*l.model, l.truth, 0.5, 77, i);
      const auto key = expectation_key(77, i);
      sym = sym && christoffel_symmetric(
                       christoffel(l.model->metric(p, key), l.model->metric_partials(p, key)));
    }
  }
  const auto fd = [&] {
    bool ok = true;
    std::string d;
    for (const auto& mc : all) {
      const CheckResult* r = find_check(mc.results, "christoffel vs finite-difference metric");
      ok = ok && r && r->passed;
      d += " " + mc.name + "=" + (r ? fmt(r->measured) : std::string("missing"));
    }
    return std::make_pair(ok, d);
  }();
  line("4", sym && fd.first,
       std::string("christoffel symmetric at 100 points per model: ") + (sym ? "yes" : "no") +
           "; vs finite-difference metric (tol 1e-4):" + fd.second);
}

void criterion_5() {
  const GaussianParamIndex idx(2);
  // one observation, so the metric is the per-observation Fisher information
  GaussianModel m(Observations{Matrix(Eigen::RowVector2d(0.3, -0.2)), {"z1", "z2"}});
  const Matrix g = m.metric(idx.to_theta(Vector::Zero(2), Matrix::Identity(2, 2))).matrix();
  double off = 0.0;
  for (Eigen::Index r = 0; r < 2; ++r)
    for (Eigen::Index c = 2; c < 5; ++c) off = std::max({off, std::abs(g(r, c)), std::abs(g(c, r))});
  Matrix want = Matrix::Zero(3, 3);
  want.diagonal() << 0.5, 0.25, 0.5;
  const double lower = (g.bottomRightCorner(3, 3) - want).cwiseAbs().maxCoeff();

  // block structure also at a generic point of a 3-D model
  GaussianModel m3(gen_mvn(Eigen::Vector3d(0, 1, 2), Matrix::Identity(3, 3), 50, 1));
  Matrix cov(3, 3);
  cov << 2, 0.4, 0.1, 0.4, 1.5, -0.2, 0.1, -0.2, 1.0;
  const Matrix g3 = m3.metric(GaussianParamIndex(3).to_theta(Eigen::Vector3d(0.1, 0.8, 2.2), cov)).matrix();
  const double off3 = std::max(g3.topRightCorner(3, 6).cwiseAbs().maxCoeff(),
                               g3.bottomLeftCorner(6, 3).cwiseAbs().maxCoeff());
  line("5", off == 0.0 && off3 == 0.0 && lower <= 1e-12,
       "gaussian metric mean/covariance blocks exactly zero (" + fmt(std::max(off, off3)) +
           "); d=2 identity lower block vs diag(1/2,1/4,1/2): " + fmt(lower) + " (tol 1e-12)");
}

void criterion_6() {
  const std::array<double, 3> target{0.2, 0.5, 0.3};
  const double q[3][3] = {{0.1, 0.6, 0.3}, {0.5, 0.2, 0.3}, {0.25, 0.25, 0.5}};
  CounterRng rng(derive_key({606}));
  std::array<double, 3> visits{0, 0, 0};
  int state = 0;
  const int steps = 1000000;
  for (int s = 0; s < steps; ++s) {
    const double r = rng.uniform();
    const int next = r < q[state][0] ? 0 : (r < q[state][0] + q[state][1] ? 1 : 2);
    if (mh_accept(std::log(target[state]), std::log(target[next]), std::log(q[state][next]),
                  std::log(q[next][state]), rng.uniform()))
      state = next;
    visits[static_cast<std::size_t>(state)] += 1.0;
  }
  double tv = 0.0;
  for (int i = 0; i < 3; ++i) tv += 0.5 * std::abs(visits[i] / steps - target[i]);
  line("6", tv < 0.01, "mh_accept 3-state chain, 1e6 steps: TV distance " + fmt(tv) + " (tol 0.01)");
}

void criterion_7() {
  const FpeStudy s = rayleigh_fpe_study();
  line("7a", s.mmala_residual < 1e-3,
       "mmala drift residual on the manifold fokker-planck equation, rayleigh grid: max |r| " +
           fmt(s.mmala_residual) + " (tol 1e-3)");
  line("7b", s.smm_printed_mismatch < 1e-3,
       "simplified-mmala residual vs stated analytic expression: max mismatch " +
           fmt(s.smm_printed_mismatch) + " (tol 1e-3); vs +1/2 D'p' + 1/2 p D'' : " +
           fmt(s.smm_corrected_mismatch));
  line("7c", std::max(s.constant_residual, s.constant_expression) < 1e-6,
       "constant-metric simplified residual: max |r| " + fmt(s.constant_residual) +
           ", expression " + fmt(s.constant_expression) + " (tol 1e-6)");
}

// --- Monte-Carlo criteria ----------------------------------------------------

struct Run {
  Loaded loaded;
  ExperimentResult result;
  double seconds = 0.0;
};

Run run_preset(const std::string& preset, const std::function<void(ExperimentConfig&)>& tweak = {}) {
  Run r;
  r.loaded = load(preset);
  if (tweak) tweak(r.loaded.config);
  const auto t0 = std::chrono::steady_clock::now();
  r.result = run_experiment(r.loaded.config, *r.loaded.model, threads());
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string summary(const RunReport& r) {
  return "acc " + fmt(r.acceptance_percent.median) + "%, warmup " + fmt(r.warmup) + ", detected " +
         std::to_string(r.detected) + "/" + std::to_string(r.chains) + ", sufficient " +
         std::to_string(r.sufficient);
}

void criterion_9(const Run& run) {
  const RunReport& gala = method(run.result, Variant::gala).report;
  const RunReport& mala = method(run.result, Variant::mala).report;
  const double acc = gala.acceptance_percent.median;
  const auto mean = median_component(gala, &RunReport::mean, 0);
  const auto gv = median_component(gala, &RunReport::variance, 0);
  const auto mv = median_component(mala, &RunReport::variance, 0);
  const bool acc_ok = acc >= 85.0 && acc <= 95.0;
  const bool mean_ok = mean && std::abs(*mean - 2.0) <= 0.1;
  const bool warm_ok = gala.warmup && gala.warmup->median <= 150.0;
  const bool var_ok = gv && mv && *gv <= *mv;
  line("9", acc_ok && mean_ok && warm_ok && var_ok,
       "rayleigh gala: acceptance median " + fmt(acc) + "% in [85,95]: " + (acc_ok ? "ok" : "no") +
           "; mean " + opt(mean) + " within 0.1 of 2: " + (mean_ok ? "ok" : "no") +
           "; warmup median " + fmt(gala.warmup) + " <= 150: " + (warm_ok ? "ok" : "no") +
           "; variance " + opt(gv) + " <= mala " + opt(mv) + ": " + (var_ok ? "ok" : "no") +
           " (detected " + std::to_string(gala.detected) + "/" + std::to_string(gala.chains) + ")");
  for (const auto& m : run.result.methods)
    info("9", std::string(to_string(m.method.variant)) + ": " + summary(m.report));
}

// Per chain pair (same index, same seed): both chains sufficient.
std::vector<std::pair<double, double>> paired_variances(const RunReport& a, const RunReport& b,
                                                        Eigen::Index c) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < a.per_chain.size() && i < b.per_chain.size(); ++i) {
    const auto& x = a.per_chain[i];
    const auto& y = b.per_chain[i];
    if (x.sufficient && y.sufficient) out.emplace_back(x.variance(c), y.variance(c));
  }
  return out;
}

std::optional<double> median_ratio(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) return std::nullopt;
  std::vector<double> r;
  for (const auto& [g, m] : pairs) r.push_back(g > 0.0 ? m / g : std::numeric_limits<double>::infinity());
  return min_median_max(r).median;
}

void criterion_10(const Run& run) {
  const RunReport& gala = method(run.result, Variant::gala).report;
  const RunReport& mala = method(run.result, Variant::mala).report;
  const auto mean = median_component(gala, &RunReport::mean, 0);
  const double acc = gala.acceptance_percent.median;
  const auto ratio = median_ratio(paired_variances(gala, mala, 0));
  const bool mean_ok = mean && std::abs(*mean - 0.1) <= 0.01;
  const bool acc_ok = acc >= 90.0;
  const bool var_ok = ratio && *ratio >= 10.0;
  line("10", mean_ok && acc_ok && var_ok,
       "banana gala: mean B " + opt(mean) + " within 0.01 of 0.1: " + (mean_ok ? "ok" : "no") +
           "; acceptance median " + fmt(acc) + "% >= 90: " + (acc_ok ? "ok" : "no") +
           "; paired mala/gala variance ratio " + opt(ratio) + " >= 10: " +
           (var_ok ? "ok" : "no"));
  for (const auto& m : run.result.methods)
    info("10", std::string(to_string(m.method.variant)) + ": " + summary(m.report));
}

void criterion_11(const Run& run) {
  const RunReport& gala = method(run.result, Variant::gala).report;
  const RunReport& mala = method(run.result, Variant::mala).report;
  bool ok = true;
  std::string d = "weibull gala:";
  for (Eigen::Index c = 0; c < 2; ++c) {
    const auto mean = median_component(gala, &RunReport::mean, static_cast<std::size_t>(c));
    const auto gv = median_component(gala, &RunReport::variance, static_cast<std::size_t>(c));
    const auto mv = median_component(mala, &RunReport::variance, static_cast<std::size_t>(c));
    const bool mean_ok = mean && std::abs(*mean - run.loaded.truth(c)) <= 0.08;
    const bool var_ok = gv && mv && *gv * 5.0 <= *mv;
    ok = ok && mean_ok && var_ok;
    d += std::string(c == 0 ? " lambda" : "; k") + " mean " + opt(mean) + " (truth " +
         fmt(run.loaded.truth(c)) + ", tol 0.08): " + (mean_ok ? "ok" : "no") + ", variance " +
         opt(gv) + " vs mala " + opt(mv) + " (need 5x): " + (var_ok ? "ok" : "no");
  }
  line("11", ok, d);
  for (const auto& m : run.result.methods)
    info("11", std::string(to_string(m.method.variant)) + ": " + summary(m.report));
}

std::size_t converged_within(const RunReport& r, std::size_t limit) {
  std::size_t n = 0;
  for (const auto& c : r.per_chain) n += c.warmup && *c.warmup <= limit;
  return n;
}

void criterion_12(const Run& small, const Run& mid) {
  const RunReport& g5 = method(small.result, Variant::gala).report;
  const std::size_t c5 = converged_within(g5, 1000);
  const RunReport& g20 = method(mid.result, Variant::gala).report;
  const std::size_t c20 = converged_within(g20, 1500);
  const RunReport& m20 = method(mid.result, Variant::mala).report;
  const std::size_t mala_early = converged_within(m20, 1000);
  const bool ok = c5 >= 3 && c20 >= 3 && mala_early == 0;
  line("12", ok,
       "gaussian: 5-param gala converged within 1000 on " + std::to_string(c5) + "/" +
           std::to_string(g5.chains) + " chains (need 3); 20-param gala within 1500 on " +
           std::to_string(c20) + "/" + std::to_string(g20.chains) +
           " (need 3); 20-param mala warmup within 1000 on " + std::to_string(mala_early) +
           " chains (need 0)");
  for (const auto& m : small.result.methods)
    info("12", "5-param " + std::string(to_string(m.method.variant)) + ": " + summary(m.report));
  for (const auto& m : mid.result.methods)
    info("12", "20-param " + std::string(to_string(m.method.variant)) + ": " + summary(m.report));
}

void criterion_13(const Run& run) {
  const RunReport& gala = method(run.result, Variant::gala).report;
  const RunReport& mmala = method(run.result, Variant::mmala).report;
  const double true_norm = run.loaded.truth.norm();
  const bool warm_ok = gala.detected > 0;
  const bool norm_ok =
      gala.mean_norm && std::abs(gala.mean_norm->median - true_norm) <= 0.05 * true_norm;
  const double acc = gala.acceptance_percent.median;
  const bool acc_ok = acc >= 95.0;
  std::size_t later = 0;
  for (std::size_t i = 0; i < gala.per_chain.size(); ++i) {
    const auto& g = gala.per_chain[i].warmup;
    const auto& m = mmala.per_chain[i].warmup;
    later += g && (!m || *m > *g);
  }
  const bool later_ok = later >= 3;
  line("13", warm_ok && norm_ok && acc_ok && later_ok,
       "logistic D=10 gala: warmup detected on " + std::to_string(gala.detected) + "/" +
           std::to_string(gala.chains) + (warm_ok ? " ok" : " no") + "; |mean| " +
           fmt(gala.mean_norm) + " vs true " + fmt(true_norm) + " (5%): " +
           (norm_ok ? "ok" : "no") + "; acceptance median " + fmt(acc) + "% >= 95: " +
           (acc_ok ? "ok" : "no") + "; mmala later on " + std::to_string(later) +
           "/4 paired seeds (need 3): " + (later_ok ? "ok" : "no"));
  for (const auto& m : run.result.methods)
    info("13", std::string(to_string(m.method.variant)) + ": " + summary(m.report));
}

nlohmann::json without_runtime(nlohmann::json doc) {
  for (auto& m : doc["methods"]) {
    m.erase("runtime_seconds");
    for (auto& pc : m["per_chain"]) pc.erase("runtime_seconds");
  }
  return doc;
}

void criterion_14(const Run& first) {
  const Run again = run_preset("rayleigh_table1.json");
  bool same = true;
  for (std::size_t m = 0; m < first.result.methods.size(); ++m)
    for (std::size_t c = 0; c < first.result.methods[m].chains.size(); ++c) {
      same = same && first.result.methods[m].chains[c].samples ==
                         again.result.methods[m].chains[c].samples;
      same = same && first.result.methods[m].chains[c].accepted ==
                         again.result.methods[m].chains[c].accepted;
    }
  const bool report_same =
      without_runtime(report_json(first.loaded.config, first.result)).dump() ==
      without_runtime(report_json(again.loaded.config, again.result)).dump();
  line("14", same && report_same,
       std::string("rayleigh rerun with the same seed: traces identical ") + (same ? "yes" : "no") +
           ", report numbers identical (runtime excluded) " + (report_same ? "yes" : "no"));
}

void ablation_info() {
  const auto no_ratio = [](ExperimentConfig& c) {
    for (auto& m : c.methods)
      if (m.variant == Variant::gala) m.proposal_ratio = false;
  };
  const Run r = run_preset("rayleigh_table1.json", no_ratio);
  const RunReport& g = method(r.result, Variant::gala).report;
  info("abl", "rayleigh gala without proposal ratio: " + summary(g) + ", mean " +
                  opt(median_component(g, &RunReport::mean, 0)));
  const Run b = run_preset("banana_table1.json", no_ratio);
  const RunReport& gb = method(b.result, Variant::gala).report;
  info("abl", "banana gala without proposal ratio: " + summary(gb) + ", mean " +
                  opt(median_component(gb, &RunReport::mean, 0)));
}

}  // namespace

int main() {
  try {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    const auto checks = model_checks();
    gated_from_checks("2", checks, "gradient vs finite differences",
                      {"rayleigh", "banana", "weibull", "gaussian", "logistic"},
                      "analytic gradient vs finite differences, 20 points per model");
    gated_from_checks("3", checks, "metric partials vs finite differences",
                      {"rayleigh", "banana", "gaussian", "logistic"},
                      "metric partials vs finite differences, 20 points per model");
    criterion_4_symmetry_sweep(checks);
    criterion_5();
    criterion_6();
    criterion_7();
    gated_from_checks("8", checks, "metric vs Monte-Carlo oracle", {"rayleigh", "banana", "gaussian"},
                      "metric vs 200k-draw Monte-Carlo score outer product");

    const Run rayleigh = run_preset("rayleigh_table1.json");
    criterion_9(rayleigh);
    criterion_10(run_preset("banana_table1.json"));
    criterion_11(run_preset("weibull_table2.json"));
    criterion_12(run_preset("gaussian_5param.json"), run_preset("gaussian_20param.json"));
    criterion_13(run_preset("logreg_10d.json"));
    criterion_14(rayleigh);
    ablation_info();

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d failing criteria, %.1f s\n", failures, secs);
  } catch (const std::exception& e) {
    std::printf("FAIL  --  aborted: %s\n", e.what());
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
