#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "manifold_langevin/errors.hpp"
#include "manifold_langevin/experiment.hpp"

using namespace manifold_langevin;
using nlohmann::json;

namespace {

const std::filesystem::path kSource = ML_SOURCE_DIR;

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

// Enough of JSON Schema for the report document: type, enum, required,
// properties, items and local $ref.
class MiniValidator {
 public:
  explicit MiniValidator(json schema) : root_(std::move(schema)) {}

  std::vector<std::string> validate(const json& doc) const {
    std::vector<std::string> errors;
    check(root_, doc, "$", errors);
    return errors;
  }

 private:
  static bool type_matches(const std::string& t, const json& v) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    return false;
  }

  void check(const json& s, const json& v, const std::string& at,
             std::vector<std::string>& errors) const {
    if (s.contains("type")) {
      const json types = s["type"].is_array() ? s["type"] : json::array({s["type"]});
      bool ok = false;
      for (const auto& t : types) ok = ok || type_matches(t.get<std::string>(), v);
      if (!ok) {
        errors.push_back(at + ": wrong type");
        return;
      }
      if (v.is_null()) return;
    }
    if (s.contains("$ref")) {
      const std::string ref = s["$ref"];
      check(root_.at(json::json_pointer(ref.substr(1))), v, at, errors);
    }
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || e == v;
      if (!found) errors.push_back(at + ": not in enum");
    }
    if (s.contains("required") && v.is_object()) {
      for (const auto& k : s["required"])
        if (!v.contains(k.get<std::string>())) errors.push_back(at + ": missing " + k.get<std::string>());
    }
    if (s.contains("properties") && v.is_object()) {
      for (const auto& [k, sub] : s["properties"].items())
        if (v.contains(k)) check(sub, v[k], at + "." + k, errors);
    }
    if (s.contains("items") && v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i)
        check(s["items"], v[i], at + "[" + std::to_string(i) + "]", errors);
    }
  }

  json root_;
};

json small_rayleigh() {
  return json::parse(R"({
    "name": "small",
    "model": {"kind": "rayleigh", "true_params": [2.0]},
    "data": {"generate": {"n": 100, "seed": 3}},
    "methods": [
      {"name": "mala", "step_size": 0.01},
      {"name": "mmala", "step_size": 0.1},
      {"name": "gala", "step_size": 0.2, "proposal_ratio": false},
      {"name": "hmc", "step_size": 0.04, "leapfrog_steps": 10}
    ],
    "chain_length": 300, "chains": 3, "warmup_rel_tol": 0.1, "n_post": 100,
    "init_box": 0.5, "seed": 9
  })");
}

std::string error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, RoundTripEveryPreset) {
  for (const auto& entry : std::filesystem::directory_iterator(kSource / "presets")) {
    const ExperimentConfig c = load_config(entry.path());
    EXPECT_EQ(parse_config(to_json(c)), c) << entry.path();
  }
  const ExperimentConfig s = parse_config(small_rayleigh());
  EXPECT_FALSE(s.methods[2].proposal_ratio);
  EXPECT_EQ(parse_config(to_json(s)), s);
  ExperimentConfig changed = s;
  changed.methods[2].proposal_ratio = true;
  EXPECT_FALSE(changed == s);
}

TEST(Config, ErrorsNameTheField) {
  json d = small_rayleigh();
  d["methods"][1]["step_size"] = -1.0;
  EXPECT_NE(error_of(d).find("methods[1].step_size"), std::string::npos);

  d = small_rayleigh();
  d["methods"][0]["name"] = "nuts";
  EXPECT_NE(error_of(d).find("methods[0].name"), std::string::npos);

  d = small_rayleigh();
  d["methods"][3].erase("leapfrog_steps");
  EXPECT_NE(error_of(d).find("leapfrog_steps"), std::string::npos);

  d = small_rayleigh();
  d["data"]["generate"]["n"] = 0;
  EXPECT_NE(error_of(d).find("data.generate.n"), std::string::npos);

  d = small_rayleigh();
  d.erase("model");
  EXPECT_NE(error_of(d).find("model"), std::string::npos);

  d = small_rayleigh();
  d["warmup_rel_tol"] = "tight";
  EXPECT_NE(error_of(d).find("warmup_rel_tol"), std::string::npos);

  d = small_rayleigh();
  d["methods"][2]["proposal_ratio"] = 1;
  EXPECT_NE(error_of(d).find("proposal_ratio"), std::string::npos);
}

TEST(Experiment, InitialPointsSharedAndInsideBox) {
  const ExperimentConfig c = parse_config(small_rayleigh());
  const auto model = build_model(c, resolve_observations(c));
  const Vector truth = true_parameters(c.model);
  for (std::size_t i = 0; i < 20; ++i) {
    const Vector a = initial_point(*model, truth, c.init_box, c.seed, i);
    EXPECT_EQ(a, initial_point(*model, truth, c.init_box, c.seed, i));
    EXPECT_LE(std::abs(a(0) - 2.0), 1.0);
    EXPECT_TRUE(model->in_support(a));
  }
  EXPECT_NE(chain_seed(1, 0), chain_seed(1, 1));
  EXPECT_NE(chain_seed(1, 0), chain_seed(2, 0));
}

TEST(Experiment, ResultsIndependentOfThreadCount) {
  const ExperimentConfig c = parse_config(small_rayleigh());
  const auto model = build_model(c, resolve_observations(c));
  const ExperimentResult one = run_experiment(c, *model, 1);
  const ExperimentResult four = run_experiment(c, *model, 4);
  ASSERT_EQ(one.methods.size(), four.methods.size());
  for (std::size_t m = 0; m < one.methods.size(); ++m) {
    for (std::size_t k = 0; k < c.chains; ++k) {
      EXPECT_EQ(one.methods[m].chains[k].samples, four.methods[m].chains[k].samples);
      EXPECT_EQ(one.methods[m].chains[k].accepted, four.methods[m].chains[k].accepted);
    }
  }
  json a = report_json(c, one), b = report_json(c, four);
  for (auto* doc : {&a, &b})
    for (auto& m : (*doc)["methods"]) {
      m.erase("runtime_seconds");
      for (auto& pc : m["per_chain"]) pc.erase("runtime_seconds");
    }
  EXPECT_EQ(a, b);
}

TEST(Experiment, ReportMatchesSchemaAndOutputsWritten) {
  const ExperimentConfig c = parse_config(small_rayleigh());
  const auto model = build_model(c, resolve_observations(c));
  const ExperimentResult r = run_experiment(c, *model, 2);
  const MiniValidator v(read_json(kSource / "docs" / "report_schema.json"));
  const json report = report_json(c, r);
  const auto errors = v.validate(report);
  EXPECT_TRUE(errors.empty()) << (errors.empty() ? "" : errors.front());
  EXPECT_EQ(report["methods"][2]["proposal_ratio"], false);
  EXPECT_EQ(report["methods"][3]["leapfrog_steps"], 10);

  json broken = report;
  broken["methods"][0].erase("acceptance_percent");
  EXPECT_FALSE(v.validate(broken).empty());

  const auto out = std::filesystem::temp_directory_path() / "ml_experiment_test";
  std::filesystem::remove_all(out);
  write_experiment_outputs(c, r, out);
  EXPECT_TRUE(std::filesystem::exists(out / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(out / "hmc" / "chain_3.csv"));
  EXPECT_EQ(read_json(out / "report.json")["methods"].size(), 4u);
  std::filesystem::remove_all(out);
}

TEST(Experiment, GaussianTrueParametersFromMeanAndCovariance) {
  const ExperimentConfig c = load_config(kSource / "presets" / "gaussian_5param.json");
  const Vector t = true_parameters(c.model);
  ASSERT_EQ(t.size(), 5);
  EXPECT_EQ(t(0), 1.0);
  EXPECT_EQ(t(1), -2.0);
}

TEST(Experiment, CsvDataResolvesAgainstBaseDir) {
  const auto dir = std::filesystem::temp_directory_path() / "ml_csv_case";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "z.csv");
    f << "z1\n1.5\n2.5\n3.0\n";
  }
  json d = small_rayleigh();
  d["data"] = {{"csv", "z.csv"}};
  const ExperimentConfig c = parse_config(d);
  const Observations o = resolve_observations(c, dir);
  EXPECT_EQ(o.count(), 3);
  EXPECT_THROW(resolve_observations(c, dir / "nowhere"), InputError);
  std::filesystem::remove_all(dir);
}
