#include "behave/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "behave/kernels.hpp"
#include "behave/rng.hpp"

namespace behave {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(TrainingMode m) {
  switch (m) {
    case TrainingMode::TaskOnly: return "task-only";
    case TrainingMode::SuiteOnly: return "suite-only";
    case TrainingMode::Sequential: return "sequential";
  }
  return "";
}

std::string_view to_string(Metric m) { return m == Metric::Accuracy ? "accuracy" : "macro_f1"; }

json ComparisonSpec::to_json() const {
  return {{"a", a}, {"b", b}, {"test_set", test_set}, {"metric", to_string(metric)}};
}

std::string file_stem(std::string_view name) {
  std::string s;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '.';
    s += ok ? c : '_';
  }
  return s;
}

// ---------------------------------------------------------------------------
// Config

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

Metric parse_metric(const std::string& s) {
  const auto l = ascii_lower(s);
  if (l == "accuracy" || l == "acc") return Metric::Accuracy;
  if (l == "macro_f1" || l == "macro-f1" || l == "f1") return Metric::MacroF1;
  throw ConfigError("unknown metric '" + s + "' (expected accuracy or macro_f1)");
}

TrainingMode parse_mode(const std::string& s) {
  const auto l = ascii_lower(s);
  if (l == "task-only" || l == "task_only" || l == "task") return TrainingMode::TaskOnly;
  if (l == "suite-only" || l == "suite_only" || l == "suite") return TrainingMode::SuiteOnly;
  if (l == "sequential" || l == "task-then-suite") return TrainingMode::Sequential;
  throw ConfigError("unknown training mode '" + s + "'");
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + k + "'");
    }
  }
}

TaskSource parse_task(const json& j, const fs::path& base, std::size_t index) {
  const std::string where = "tasks[" + std::to_string(index) + "]";
  check_keys(j, {"name", "path", "train", "validation", "test", "schema", "collapse", "split",
                 "stratified"},
             where);
  TaskSource t;
  if (!j.contains("name")) throw ConfigError(where + ": missing 'name'");
  t.name = j.at("name").get<std::string>();
  if (t.name.empty()) throw ConfigError(where + ": empty name");
  const bool single = j.contains("path");
  const bool three = j.contains("train") || j.contains("validation") || j.contains("test");
  if (single == three) {
    throw ConfigError(where + ": give either 'path' or all of 'train', 'validation', 'test'");
  }
  if (single) {
    t.path = resolve(base, j.at("path").get<std::string>());
  } else {
    if (!j.contains("train") || !j.contains("validation") || !j.contains("test")) {
      throw ConfigError(where + ": three-file mode needs 'train', 'validation' and 'test'");
    }
    t.presplit = std::array<fs::path, 3>{resolve(base, j.at("train").get<std::string>()),
                                         resolve(base, j.at("validation").get<std::string>()),
                                         resolve(base, j.at("test").get<std::string>())};
  }
  if (j.contains("schema")) {
    check_keys(j.at("schema"), {"id", "text", "label", "delimiter"}, where + ".schema");
    t.schema = TaskSchema::from_json(j.at("schema"));
  }
  if (j.contains("collapse")) t.collapse = CollapseRule::from_json(j.at("collapse"));
  if (j.contains("split")) {
    const auto r = j.at("split").get<std::vector<double>>();
    if (r.size() != 3) throw ConfigError(where + ": 'split' needs three ratios");
    t.ratios = {r[0], r[1], r[2]};
  }
  t.stratified = j.value("stratified", false);
  return t;
}

ComparisonSpec parse_comparison(const json& j, std::size_t index) {
  const std::string where = "significance.comparisons[" + std::to_string(index) + "]";
  check_keys(j, {"a", "b", "test_set", "metric"}, where);
  ComparisonSpec c;
  c.a = j.at("a").get<std::string>();
  c.b = j.at("b").get<std::string>();
  c.test_set = j.at("test_set").get<std::string>();
  c.metric = parse_metric(j.value("metric", "accuracy"));
  return c;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j, const fs::path& base_dir) {
  ExperimentConfig c;
  try {
    check_keys(j, {"master_seed", "suite", "tasks", "axes", "modes", "features", "grid",
                   "grid_mode", "significance", "analysis", "output_dir", "threads",
                   "save_models"},
               "config");
    if (!j.contains("master_seed")) throw ConfigError("config: 'master_seed' is required");
    if (!j.at("master_seed").is_number_integer()) {
      throw ConfigError("config: 'master_seed' must be an integer");
    }
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("suite")) {
      const auto& s = j.at("suite");
      check_keys(s, {"path", "schema", "taxonomy"}, "suite");
      SuiteSource src;
      src.path = resolve(base_dir, s.at("path").get<std::string>());
      if (s.contains("schema")) {
        src.schema = s.at("schema").is_string()
                         ? SuiteSchema::load(resolve(base_dir, s.at("schema").get<std::string>()))
                         : SuiteSchema::parse(s.at("schema").dump());
      }
      if (s.contains("taxonomy")) src.taxonomy = resolve(base_dir, s.at("taxonomy").get<std::string>());
      c.suite = std::move(src);
    }
    if (j.contains("tasks")) {
      std::size_t i = 0;
      for (const auto& t : j.at("tasks")) c.tasks.push_back(parse_task(t, base_dir, i++));
    }
    if (j.contains("axes")) {
      c.axes.clear();
      for (const auto& a : j.at("axes")) {
        const auto s = a.get<std::string>();
        const auto ax = parse_axis(s);
        if (!ax) throw ConfigError("config: unknown axis '" + s + "'");
        if (std::find(c.axes.begin(), c.axes.end(), *ax) == c.axes.end()) c.axes.push_back(*ax);
      }
    }
    if (j.contains("modes")) {
      c.modes.clear();
      for (const auto& m : j.at("modes")) {
        const auto mode = parse_mode(m.get<std::string>());
        if (std::find(c.modes.begin(), c.modes.end(), mode) == c.modes.end()) c.modes.push_back(mode);
      }
    }
    if (j.contains("features")) {
      check_keys(j.at("features"), {"word_orders", "char_orders", "dimension", "normalization"},
                 "features");
      c.features = FeatureConfig::from_json(j.at("features"));
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      check_keys(g, {"learning_rates", "batch_sizes", "epochs", "base", "weighted_validation"},
                 "grid");
      if (g.contains("base")) {
        check_keys(g.at("base"), {"learning_rate", "batch_size", "epochs", "weight_decay", "beta1",
                                  "beta2", "epsilon", "class_weighted"},
                   "grid.base");
      }
      c.grid = GridSpec::from_json(g);
    }
    if (j.contains("grid_mode")) {
      const auto m = ascii_lower(j.at("grid_mode").get<std::string>());
      if (m == "per-plan" || m == "per_plan") c.grid_mode = GridMode::PerPlan;
      else if (m == "shared") c.grid_mode = GridMode::Shared;
      else throw ConfigError("config: grid_mode must be 'per-plan' or 'shared'");
    }
    if (j.contains("significance")) {
      const auto& s = j.at("significance");
      check_keys(s, {"alpha", "iterations", "two_sided", "binomial", "comparisons",
                     "include_defaults"},
                 "significance");
      auto& sig = c.significance;
      sig.alpha = s.value("alpha", sig.alpha);
      sig.iterations = s.value("iterations", sig.iterations);
      if (s.contains("two_sided")) {
        const auto r = ascii_lower(s.at("two_sided").get<std::string>());
        if (r == "double-tail" || r == "doubling") sig.rule = TwoSidedRule::DoubleTail;
        else if (r == "min-likelihood") sig.rule = TwoSidedRule::MinLikelihood;
        else throw ConfigError("significance.two_sided must be 'double-tail' or 'min-likelihood'");
      }
      if (s.contains("binomial")) {
        const auto b = ascii_lower(s.at("binomial").get<std::string>());
        if (b == "paired") sig.one_sample = false;
        else if (b == "one-sample") sig.one_sample = true;
        else throw ConfigError("significance.binomial must be 'paired' or 'one-sample'");
      }
      if (s.contains("comparisons")) {
        const auto& cmp = s.at("comparisons");
        if (cmp.is_string()) {
          const auto v = ascii_lower(cmp.get<std::string>());
          if (v == "default") sig.use_defaults = true;
          else if (v == "none") sig.use_defaults = false;
          else throw ConfigError("significance.comparisons must be 'default', 'none' or a list");
        } else {
          sig.use_defaults = s.value("include_defaults", false);
          std::size_t i = 0;
          for (const auto& e : cmp) sig.comparisons.push_back(parse_comparison(e, i++));
        }
      }
    }
    if (j.contains("analysis")) {
      check_keys(j.at("analysis"), {"top_k"}, "analysis");
      c.top_k = j.at("analysis").value("top_k", c.top_k);
    }
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
    c.threads = j.value("threads", 0);
    c.save_models = j.value("save_models", false);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.echo = j;
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

bool ExperimentConfig::has_mode(TrainingMode m) const {
  return std::find(modes.begin(), modes.end(), m) != modes.end();
}

bool ExperimentConfig::has_axis(Axis a) const {
  return std::find(axes.begin(), axes.end(), a) != axes.end();
}

namespace {

std::vector<std::string> expected_configurations(const ExperimentConfig& c) {
  std::vector<std::string> names;
  if (c.has_mode(TrainingMode::TaskOnly) || c.has_mode(TrainingMode::Sequential)) {
    for (const auto& t : c.tasks) names.push_back(t.name);
  }
  if (c.suite) {
    if (c.has_mode(TrainingMode::SuiteOnly)) {
      for (auto a : c.axes) names.emplace_back(scheme_name(a));
    }
    if (c.has_mode(TrainingMode::Sequential)) {
      for (const auto& t : c.tasks) {
        for (auto a : c.axes) names.push_back(t.name + "-" + std::string(scheme_name(a)));
      }
    }
  }
  return names;
}

void require_file(const fs::path& p, const std::string& what) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) throw ConfigError(what + ": file not found: " + p.string());
}

}  // namespace

void ExperimentConfig::validate() const {
  if (modes.empty()) throw ConfigError("config: no training modes");
  features.validate();
  for (const auto& h : grid.points()) h.validate();
  if (grid.points().empty()) throw ConfigError("config: empty hyperparameter grid");
  if (!(significance.alpha > 0.0 && significance.alpha < 1.0)) {
    throw ConfigError("config: significance.alpha must lie in (0, 1)");
  }
  if (significance.iterations < 1) throw ConfigError("config: significance.iterations must be >= 1");
  if (top_k < 1) throw ConfigError("config: analysis.top_k must be >= 1");
  if (threads < 0) throw ConfigError("config: threads must be >= 0");
  const bool needs_suite = has_mode(TrainingMode::SuiteOnly) || has_mode(TrainingMode::Sequential);
  if (needs_suite && !suite) throw ConfigError("config: suite-trained modes need a 'suite'");
  if (needs_suite && axes.empty()) throw ConfigError("config: suite-trained modes need at least one axis");
  const bool needs_tasks = has_mode(TrainingMode::TaskOnly) || has_mode(TrainingMode::Sequential);
  if (needs_tasks && tasks.empty()) throw ConfigError("config: task-trained modes need 'tasks'");
  if (suite) {
    require_file(suite->path, "suite");
    if (suite->taxonomy) require_file(*suite->taxonomy, "taxonomy");
  }
  std::set<std::string, std::less<>> names;
  for (const auto& t : tasks) {
    if (!names.insert(t.name).second) throw ConfigError("config: duplicate task name '" + t.name + "'");
    for (auto a : {Axis::None, Axis::Functionality, Axis::Identity, Axis::Class}) {
      if (t.name == scheme_name(a)) {
        throw ConfigError("config: task name '" + t.name + "' collides with a scheme name");
      }
    }
    if (t.path) require_file(*t.path, "task " + t.name);
    if (t.presplit) {
      for (const auto& p : *t.presplit) require_file(p, "task " + t.name);
    }
  }
  const auto configs = expected_configurations(*this);
  std::set<std::string, std::less<>> stems;
  for (const auto& n : configs) {
    if (!stems.insert(file_stem(n)).second) {
      throw ConfigError("config: configuration names collide on disk: " + n);
    }
  }
  for (const auto& cmp : significance.comparisons) {
    for (const auto* side : {&cmp.a, &cmp.b}) {
      if (std::find(configs.begin(), configs.end(), *side) == configs.end()) {
        throw ConfigError("comparison refers to configuration '" + *side +
                          "', which this config does not train");
      }
    }
    bool known = names.contains(cmp.test_set);
    for (auto a : axes) known = known || cmp.test_set == scheme_name(a);
    if (!known) throw ConfigError("comparison test set '" + cmp.test_set + "' is not available");
  }
}

// ---------------------------------------------------------------------------
// Results

json ConfigurationResult::to_json() const {
  json j;
  j["name"] = name;
  j["mode"] = to_string(mode);
  j["task"] = task ? json(*task) : json(nullptr);
  j["scheme"] = scheme ? json(scheme_name(*scheme)) : json(nullptr);
  if (hyperparams) j["hyperparameters"] = hyperparams->to_json();
  if (validation_loss) j["validation_loss"] = *validation_loss;
  if (all_split) j["all_split_accuracy"] = fraction_json(*all_split);
  json aggs = json::array();
  for (const auto& a : aggregates) aggs.push_back(a.to_json());
  j["heldout_aggregates"] = aggs;
  json tt = json::array();
  for (const auto& [t, f] : task_test) {
    json e = f.to_json();
    e["test_set"] = t;
    e["n"] = f.confusion.total();
    tt.push_back(e);
  }
  j["task_test"] = tt;
  json ps = json::array();
  for (const auto& p : plans) {
    json e = p.eval.to_json();
    e["hyperparameters"] = p.hyperparams.to_json();
    e["validation_loss"] = p.validation_loss ? json(*p.validation_loss) : json(nullptr);
    e["predictions"] = p.predictions_file;
    ps.push_back(e);
  }
  j["plans"] = ps;
  json files = json::object();
  for (const auto& [k, v] : prediction_files) files[k] = v;
  j["prediction_files"] = files;
  return j;
}

json SignificanceRow::to_json() const {
  json j = spec.to_json();
  j["compared"] = spec.a + " and " + spec.b;
  j["test"] = result.to_json();
  j["p_value"] = result.p_value;
  j["significant"] = significant;
  return j;
}

json DeltaTable::to_json() const {
  json j;
  j["task"] = task;
  j["before"] = before;
  j["after"] = after;
  j["n"] = records.size();
  json cats = json::object();
  for (std::size_t ci = 0; ci < 4; ++ci) {
    json rows = json::array();
    for (auto pos : top[ci]) {
      json r = records[pos].to_json();
      auto it = texts.find(records[pos].id);
      r["text"] = it == texts.end() ? "" : it->second;
      rows.push_back(r);
    }
    cats[std::string(to_string(kExtremeCategories[ci]))] = rows;
  }
  j["extremes"] = cats;
  return j;
}

const ConfigurationResult* ExperimentReport::find(std::string_view name) const {
  for (const auto& c : configurations) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

json ExperimentReport::body() const {
  json j;
  j["format"] = "behave-report/1";
  j["status"] = failure ? "failed" : "complete";
  j["provenance"] = provenance;
  json cs = json::array();
  for (const auto& c : configurations) cs.push_back(c.to_json());
  j["configurations"] = cs;
  json sig = json::array();
  for (const auto& s : significance) sig.push_back(s.to_json());
  j["significance"] = sig;
  json dt = json::array();
  for (const auto& d : deltas) dt.push_back(d.to_json());
  j["delta_p"] = dt;
  j["observations"] = observations;
  j["artifacts"] = artifacts;
  j["notes"] = notes;
  if (failure) {
    j["failure"] = {{"configuration", failure->configuration},
                    {"plan", failure->plan},
                    {"message", failure->message}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Comparisons

std::vector<ComparisonSpec> default_comparisons(const ExperimentReport& report,
                                                const ExperimentConfig& config) {
  std::vector<ComparisonSpec> out;
  auto have = [&](const std::string& n) { return report.find(n) != nullptr; };
  auto add = [&](std::string a, std::string b, std::string set, Metric m) {
    if (have(a) && have(b)) out.push_back({std::move(a), std::move(b), std::move(set), m});
  };
  std::vector<std::string> tasks;
  for (const auto& t : config.tasks) tasks.push_back(t.name);
  if (report.plans.contains("All")) {
    for (const auto& t : tasks) add(t + "-All", t, "All", Metric::Accuracy);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      for (std::size_t k = i + 1; k < tasks.size(); ++k) {
        add(tasks[i] + "-All", tasks[k] + "-All", "All", Metric::Accuracy);
      }
    }
    for (const auto& t : tasks) add(t + "-All", "All", "All", Metric::Accuracy);
  }
  for (auto axis : {Axis::Functionality, Axis::Identity, Axis::Class}) {
    const std::string scheme(scheme_name(axis));
    if (!report.plans.contains(scheme)) continue;
    for (const auto& t : tasks) add(t + "-" + scheme, t, scheme, Metric::Accuracy);
  }
  for (const auto& t : tasks) {
    for (const auto& u : tasks) add(t + "-All", t, u, Metric::MacroF1);
  }
  for (const auto& t : tasks) add(t + "-All", "All", t, Metric::MacroF1);
  return out;
}

namespace {

Label predicted_for(const ConfigurationResult& c, const std::string& plan, const std::string& id) {
  if (c.scheme) {
    auto it = c.plan_predictions.find(plan);
    if (it == c.plan_predictions.end()) {
      throw Error("configuration " + c.name + " has no predictions for plan " + plan);
    }
    return hard_label(it->second.at(id));
  }
  if (!c.suite_predictions) throw Error("configuration " + c.name + " has no suite predictions");
  return hard_label(c.suite_predictions->at(id));
}

}  // namespace

AlignedPair align_for_comparison(const ExperimentReport& report, const ComparisonSpec& spec,
                                 const TestSuite* suite,
                                 const std::map<std::string, GoldLabels, std::less<>>& task_gold) {
  const auto* a = report.find(spec.a);
  const auto* b = report.find(spec.b);
  if (!a || !b) {
    throw ConfigError("comparison " + spec.a + " vs " + spec.b + ": unknown configuration");
  }
  AlignedPair out;
  auto scheme_it = report.plans.find(spec.test_set);
  if (scheme_it != report.plans.end()) {
    if (!suite) throw Error("comparison on " + spec.test_set + " needs the suite");
    for (const auto* c : {a, b}) {
      if (c->scheme && scheme_name(*c->scheme) != spec.test_set) {
        throw ConfigError("comparison: configuration " + c->name + " was not trained on " +
                          spec.test_set + " plans");
      }
    }
    for (const auto& plan : scheme_it->second) {
      const std::string pname = plan.name();
      for (const auto& id : plan.test) {
        const auto* tc = suite->find(id);
        if (!tc) throw Error("plan " + pname + " references unknown case " + id);
        if (plan.axis != Axis::None && !plan.is_heldout(*tc, *suite)) continue;
        out.a.push_back(predicted_for(*a, pname, id));
        out.b.push_back(predicted_for(*b, pname, id));
        out.gold.push_back(tc->gold);
      }
    }
  } else {
    auto g = task_gold.find(spec.test_set);
    if (g == task_gold.end()) throw ConfigError("comparison: unknown test set " + spec.test_set);
    for (const auto* c : {a, b}) {
      if (!c->task_predictions.contains(spec.test_set)) {
        throw ConfigError("comparison: configuration " + c->name + " has no predictions on " +
                          spec.test_set);
      }
    }
    const auto& pa = a->task_predictions.find(spec.test_set)->second;
    const auto& pb = b->task_predictions.find(spec.test_set)->second;
    for (const auto& [id, label] : g->second) {
      out.a.push_back(hard_label(pa.at(id)));
      out.b.push_back(hard_label(pb.at(id)));
      out.gold.push_back(label);
    }
  }
  if (out.gold.empty()) throw Error("comparison on " + spec.test_set + ": empty test set");
  return out;
}

SignificanceRow run_comparison(const ExperimentReport& report, const ComparisonSpec& spec,
                               const SignificanceConfig& sig, std::uint64_t master_seed,
                               const TestSuite* suite,
                               const std::map<std::string, GoldLabels, std::less<>>& task_gold) {
  const auto aligned = align_for_comparison(report, spec, suite, task_gold);
  SignificanceRow row;
  row.spec = spec;
  if (spec.metric == Metric::Accuracy) {
    if (sig.one_sample) {
      std::int64_t ca = 0, cb = 0;
      for (std::size_t i = 0; i < aligned.gold.size(); ++i) {
        ca += aligned.a[i] == aligned.gold[i];
        cb += aligned.b[i] == aligned.gold[i];
      }
      const auto n = static_cast<std::int64_t>(aligned.gold.size());
      row.result = binomial_one_sample_test(ca, n, static_cast<double>(cb) / static_cast<double>(n),
                                            sig.rule);
    } else {
      row.result = binomial_paired_test(aligned.a, aligned.b, aligned.gold, sig.rule);
    }
  } else {
    const auto seed = derive_seed(master_seed, "significance", spec.a, spec.b, spec.test_set);
    row.result = randomization_test_macro_f1(aligned.a, aligned.b, aligned.gold, sig.iterations, seed);
  }
  row.significant = decide(row.result, sig.alpha);
  return row;
}

// ---------------------------------------------------------------------------
// Orchestration

namespace {

struct LoadedTask {
  std::string name;
  TaskDataset dataset;
  TaskSplits splits;
  FeatureSet train;
  FeatureSet validation;
  FeatureSet test;
  GoldLabels test_gold;
};

LoadedTask load_task(const TaskSource& src, const ExperimentConfig& cfg) {
  LoadedTask t;
  t.name = src.name;
  if (src.path) {
    t.dataset = load_task_dataset(*src.path, src.collapse, src.schema, src.name);
    t.splits = split_task(t.dataset, src.ratios, cfg.master_seed, src.stratified);
  } else {
    const auto& p = *src.presplit;
    auto tr = load_task_dataset(p[0], src.collapse, src.schema, src.name + "/train");
    auto va = load_task_dataset(p[1], src.collapse, src.schema, src.name + "/validation");
    auto te = load_task_dataset(p[2], src.collapse, src.schema, src.name + "/test");
    std::tie(t.dataset, t.splits) = join_presplit(src.name, tr, va, te);
  }
  auto make = [&](const std::vector<std::size_t>& pos, const std::string& part) {
    std::vector<std::string> ids, texts;
    std::vector<Label> labels;
    for (auto i : pos) {
      const auto& e = t.dataset.examples[i];
      ids.push_back(e.example_id);
      texts.push_back(e.text);
      labels.push_back(e.label);
    }
    return make_feature_set(src.name + "/" + part, cfg.features, std::move(ids), texts,
                            std::move(labels));
  };
  t.train = make(t.splits.train, "train");
  t.validation = make(t.splits.validation, "validation");
  t.test = make(t.splits.test, "test");
  for (std::size_t i = 0; i < t.test.size(); ++i) t.test_gold.emplace_back(t.test.ids[i], t.test.y[i]);
  return t;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}


class Runner {
 public:
  Runner(const ExperimentConfig& cfg, ExperimentReport& rep) : cfg_(cfg), rep_(rep) {}

  void run();

 private:
  void load_inputs();
  void build_plans();
  void write_inputs();
  void run_task_only(const LoadedTask& task);
  void run_scheme(const std::string& name, TrainingMode mode, const LoadedTask* task,
                  Axis axis, const TrainedModel* init);
  HyperParams shared_hyperparams(const std::string& prefix, const TrainedModel* init);
  FeatureSet suite_subset(const std::vector<std::string>& ids, const std::string& dataset) const;
  std::string write_predictions(const std::string& config, const std::string& what,
                                const PredictionSet& p);
  void run_significance();
  void run_delta_p();
  void observe();
  double validation_loss(const TrainedModel& m, const FeatureSet& train_set,
                         const FeatureSet& validation) const;

  const ExperimentConfig& cfg_;
  ExperimentReport& rep_;
  std::optional<TestSuite> suite_;
  FeatureSet suite_features_;
  std::map<std::string, std::size_t, std::less<>> suite_pos_;
  std::vector<LoadedTask> tasks_;
  std::map<std::string, TrainedModel, std::less<>> task_models_;
  std::map<std::string, HyperParams, std::less<>> shared_hp_;
  std::optional<SplitPlan> all_plan_;

 public:
  std::string stage_config;
  std::string stage_plan;
};

void Runner::load_inputs() {
  stage_config = "inputs";
  json prov;
  prov["tool"] = "behave";
  prov["version"] = kVersion;
  prov["master_seed"] = cfg_.master_seed;
  prov["config"] = cfg_.echo;
  prov["features"] = cfg_.features.to_json();
  prov["grid"] = cfg_.grid.to_json();
  prov["grid_mode"] = cfg_.grid_mode == GridMode::Shared ? "shared" : "per-plan";
  prov["significance"] = {{"alpha", cfg_.significance.alpha},
                          {"iterations", cfg_.significance.iterations},
                          {"two_sided", cfg_.significance.rule == TwoSidedRule::DoubleTail
                                            ? "double-tail"
                                            : "min-likelihood"},
                          {"binomial", cfg_.significance.one_sample ? "one-sample" : "paired"}};
  if (cfg_.suite) {
    stage_plan = "suite";
    const Taxonomy tax =
        cfg_.suite->taxonomy ? Taxonomy::load(*cfg_.suite->taxonomy) : Taxonomy::hatecheck();
    suite_ = load_suite(cfg_.suite->path, cfg_.suite->schema, tax);
    const auto validation = validate_suite(*suite_);
    prov["suite"] = {{"cases", suite_->size()},
                     {"functionalities", suite_->keys(Axis::Functionality).size()},
                     {"classes", suite_->keys(Axis::Class).size()},
                     {"identities", suite_->keys(Axis::Identity).size()},
                     {"count_mismatches", validation.count_mismatches()},
                     {"label_violations", validation.label_violations.size()},
                     {"warnings", validation.warnings}};
    std::vector<std::string> ids, texts;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < suite_->size(); ++i) {
      const auto& c = suite_->cases()[i];
      ids.push_back(c.case_id);
      texts.push_back(c.text);
      labels.push_back(c.gold);
      suite_pos_.emplace(c.case_id, i);
    }
    suite_features_ = make_feature_set("suite", cfg_.features, std::move(ids), texts, std::move(labels));
  }
  json tasks = json::array();
  for (const auto& src : cfg_.tasks) {
    stage_plan = "task " + src.name;
    tasks_.push_back(load_task(src, cfg_));
    const auto& t = tasks_.back();
    tasks.push_back({{"name", t.name},
                     {"examples", t.dataset.size()},
                     {"hateful", t.dataset.class_counts[class_index(Label::Hateful)]},
                     {"non_hateful", t.dataset.class_counts[class_index(Label::NonHateful)]},
                     {"train", t.splits.train.size()},
                     {"validation", t.splits.validation.size()},
                     {"test", t.splits.test.size()},
                     {"split_seed", t.splits.seed},
                     {"mode", src.path ? "split" : "presplit"},
                     {"stratified", src.path ? src.stratified : false},
                     {"ratios", src.ratios}});
  }
  prov["tasks"] = tasks;
  prov["conventions"] = {
      {"f1_zero_division", 0.0},
      {"task_split", "floor sizing per part, remainder to the last part"},
      {"mean_covered_accuracy", "unweighted mean over plans with a non-empty covered test set"},
      {"randomization_p_value", "(count + 1) / (iterations + 1)"},
      {"decision", "significant when p <= alpha"}};
  rep_.provenance = prov;
}

void Runner::build_plans() {
  if (!suite_) return;
  stage_config = "splits";
  json counts = json::object();
  for (auto axis : cfg_.axes) {
    const std::string scheme(scheme_name(axis));
    stage_plan = scheme;
    std::vector<SplitPlan> plans;
    if (axis == Axis::None) plans.push_back(make_all_split(*suite_, cfg_.master_seed));
    else plans = make_holdout_splits(*suite_, axis, cfg_.master_seed);
    for (const auto& p : plans) {
      const auto problems = check_plan(p, *suite_);
      if (!problems.empty()) throw Error("plan " + p.name() + ": " + problems.front());
    }
    counts[scheme] = plans.size();
    rep_.plans.emplace(scheme, std::move(plans));
  }
  auto it = rep_.plans.find("All");
  all_plan_ = it != rep_.plans.end() ? it->second.front() : make_all_split(*suite_, cfg_.master_seed);
  rep_.provenance["plans"] = counts;
}

void Runner::write_inputs() {
  stage_config = "artifacts";
  stage_plan.clear();
  const fs::path out = cfg_.output_dir;
  json art = json::object();
  if (suite_) {
    write_text(out / "suite.json", suite_to_json(*suite_).dump() + "\n");
    art["suite"] = "suite.json";
    fs::create_directories(out / "plans");
    json plans = json::object();
    for (const auto& [scheme, list] : rep_.plans) {
      json arr = json::array();
      for (const auto& p : list) arr.push_back(p.to_json());
      const std::string rel = "plans/" + file_stem(scheme) + ".json";
      write_text(out / rel, arr.dump() + "\n");
      plans[scheme] = rel;
    }
    art["plans"] = plans;
  }
  if (!tasks_.empty()) {
    fs::create_directories(out / "gold");
    json gold = json::object();
    for (const auto& t : tasks_) {
      std::string body;
      for (const auto& [id, l] : t.test_gold) {
        body += json{{"id", id}, {"label", to_string(l)}}.dump() + "\n";
      }
      const std::string rel = "gold/" + file_stem(t.name) + "_test.jsonl";
      write_text(out / rel, body);
      gold[t.name] = rel;
    }
    art["task_gold"] = gold;
  }
  rep_.artifacts = art;
}

std::string Runner::write_predictions(const std::string& config, const std::string& what,
                                      const PredictionSet& p) {
  const std::string rel = "predictions/" + file_stem(config) + "/" + file_stem(what) + ".jsonl";
  fs::create_directories(cfg_.output_dir / "predictions" / file_stem(config));
  p.write_jsonl(cfg_.output_dir / rel);
  return rel;
}

FeatureSet Runner::suite_subset(const std::vector<std::string>& ids, const std::string& dataset) const {
  std::vector<std::size_t> pos;
  pos.reserve(ids.size());
  for (const auto& id : ids) pos.push_back(suite_pos_.find(id)->second);
  return suite_features_.subset(pos, dataset);
}

double Runner::validation_loss(const TrainedModel& m, const FeatureSet& train_set,
                               const FeatureSet& validation) const {
  const ClassWeights w =
      cfg_.grid.weighted_validation ? class_weights(train_set.y) : ClassWeights{1.0, 1.0};
  return weighted_loss(m, validation.x, validation.y, w);
}

void Runner::run_task_only(const LoadedTask& task) {
  stage_config = task.name;
  stage_plan = "train";
  ConfigurationResult cr;
  cr.name = task.name;
  cr.mode = TrainingMode::TaskOnly;
  cr.task = task.name;
  const auto gr = grid_search(task.train, task.validation, cfg_.grid,
                              derive_seed(cfg_.master_seed, "train", task.name));
  cr.hyperparams = gr.hyperparams;
  cr.validation_loss = gr.validation_loss;
  const TrainedModel& model = gr.model;
  if (cfg_.save_models) {
    fs::create_directories(cfg_.output_dir / "models");
    model.save(cfg_.output_dir / "models" / (file_stem(task.name) + ".bin"));
  }
  for (const auto& t : tasks_) {
    stage_plan = "evaluate " + t.name;
    auto p = predict(model, t.test);
    cr.prediction_files["task:" + t.name] = write_predictions(cr.name, "task_" + t.name, p);
    cr.task_test.emplace_back(t.name, f1_scores(align_covering(p, t.test_gold)));
    cr.task_predictions.emplace(t.name, std::move(p));
  }
  if (suite_) {
    stage_plan = "evaluate suite";
    auto p = predict(model, suite_features_);
    cr.prediction_files["suite"] = write_predictions(cr.name, "suite", p);
    for (const auto& [scheme, plans] : rep_.plans) {
      std::vector<PlanEval> evals;
      for (const auto& plan : plans) evals.push_back(evaluate_plan(p, plan, *suite_));
      if (scheme == "All") cr.all_split = evals.front().full_test_accuracy;
      else cr.aggregates.push_back(aggregate_holdout(evals));
    }
    cr.suite_predictions = std::move(p);
  }
  std::sort(cr.aggregates.begin(), cr.aggregates.end(),
            [](const auto& x, const auto& y) { return x.axis < y.axis; });
  task_models_.emplace(task.name, model);
  rep_.configurations.push_back(std::move(cr));
}

HyperParams Runner::shared_hyperparams(const std::string& prefix, const TrainedModel* init) {
  auto it = shared_hp_.find(prefix);
  if (it != shared_hp_.end()) return it->second;
  const std::string dataset = (prefix.empty() ? std::string("All") : prefix + "-All") + "/grid";
  const auto tr = suite_subset(all_plan_->train, dataset + "/train");
  const auto va = suite_subset(all_plan_->validation, dataset + "/validation");
  const auto gr = grid_search(tr, va, cfg_.grid, derive_seed(cfg_.master_seed, "grid", prefix), init);
  shared_hp_.emplace(prefix, gr.hyperparams);
  return gr.hyperparams;
}

void Runner::run_scheme(const std::string& name, TrainingMode mode, const LoadedTask* task,
                        Axis axis, const TrainedModel* init) {
  stage_config = name;
  stage_plan.clear();
  ConfigurationResult cr;
  cr.name = name;
  cr.mode = mode;
  if (task) cr.task = task->name;
  cr.scheme = axis;
  const std::string scheme(scheme_name(axis));
  std::optional<HyperParams> shared;
  if (cfg_.grid_mode == GridMode::Shared) {
    stage_plan = "shared grid";
    shared = shared_hyperparams(task ? task->name : "", init);
  }
  std::vector<PlanEval> evals;
  for (const auto& plan : rep_.plans.at(scheme)) {
    const std::string pname = plan.name();
    stage_plan = pname;
    const std::string key = name + (axis == Axis::None ? "" : pname.substr(scheme.size()));
    const auto tr = suite_subset(plan.train, key + "/train");
    const auto va = suite_subset(plan.validation, key + "/validation");
    const auto seed = derive_seed(cfg_.master_seed, "train", name, pname);
    PlanResult pr;
    pr.plan = pname;
    TrainedModel model;
    if (shared) {
      model = train(tr, *shared, seed, init);
      pr.hyperparams = *shared;
      pr.validation_loss = validation_loss(model, tr, va);
    } else {
      auto gr = grid_search(tr, va, cfg_.grid, seed, init);
      model = std::move(gr.model);
      pr.hyperparams = gr.hyperparams;
      pr.validation_loss = gr.validation_loss;
    }
    if (cfg_.save_models) {
      fs::create_directories(cfg_.output_dir / "models" / file_stem(name));
      model.save(cfg_.output_dir / "models" / file_stem(name) / (file_stem(pname) + ".bin"));
    }
    std::vector<std::string> eval_ids = plan.validation;
    eval_ids.insert(eval_ids.end(), plan.test.begin(), plan.test.end());
    auto preds = predict(model, suite_subset(eval_ids, key + "/eval"));
    pr.predictions_file = write_predictions(name, pname, preds);
    cr.prediction_files["plan:" + pname] = pr.predictions_file;
    pr.eval = evaluate_plan(preds, plan, *suite_);
    evals.push_back(pr.eval);
    if (axis == Axis::None) {
      for (const auto& t : tasks_) {
        stage_plan = pname + " evaluate " + t.name;
        auto p = predict(model, t.test);
        cr.prediction_files["task:" + t.name] = write_predictions(name, "task_" + t.name, p);
        cr.task_test.emplace_back(t.name, f1_scores(align_covering(p, t.test_gold)));
        cr.task_predictions.emplace(t.name, std::move(p));
      }
    }
    cr.plan_predictions.emplace(pname, std::move(preds));
    cr.plans.push_back(std::move(pr));
  }
  if (axis == Axis::None) cr.all_split = evals.front().full_test_accuracy;
  else cr.aggregates.push_back(aggregate_holdout(evals));
  rep_.configurations.push_back(std::move(cr));
}

void Runner::run_significance() {
  stage_config = "significance";
  stage_plan.clear();
  std::vector<ComparisonSpec> specs;
  if (cfg_.significance.use_defaults) specs = default_comparisons(rep_, cfg_);
  for (const auto& c : cfg_.significance.comparisons) specs.push_back(c);
  std::map<std::string, GoldLabels, std::less<>> gold;
  for (const auto& t : tasks_) gold.emplace(t.name, t.test_gold);
  for (const auto& s : specs) {
    stage_plan = s.a + " vs " + s.b + " on " + s.test_set;
    rep_.significance.push_back(run_comparison(rep_, s, cfg_.significance, cfg_.master_seed,
                                               suite_ ? &*suite_ : nullptr, gold));
  }
  if (rep_.significance.empty()) rep_.notes.push_back("significance table omitted: no comparisons to run");
}

void Runner::run_delta_p() {
  stage_config = "analysis";
  for (const auto& t : tasks_) {
    const auto* before = rep_.find(t.name);
    const auto* after = rep_.find(t.name + "-All");
    if (!before || !after) continue;
    stage_plan = "delta_p " + t.name;
    DeltaTable d;
    d.task = t.name;
    d.before = before->name;
    d.after = after->name;
    d.records = delta_p(before->task_predictions.at(t.name), after->task_predictions.at(t.name),
                        t.test_gold);
    d.top = top_k_extremes(d.records, cfg_.top_k);
    for (const auto& idx : d.top) {
      for (auto i : idx) {
        const auto& id = d.records[i].id;
        for (std::size_t k = 0; k < t.test.size(); ++k) {
          if (t.test.ids[k] == id) {
            d.texts.emplace(id, t.dataset.examples[t.splits.test[k]].text);
            break;
          }
        }
      }
    }
    rep_.deltas.push_back(std::move(d));
  }
  if (rep_.deltas.empty()) rep_.notes.push_back("delta_p omitted: no task-only and [Task]-All pair");
}

void Runner::observe() {
  json obs = json::object();
  json all = json::array();
  for (const auto& s : rep_.configurations) {
    if (s.mode == TrainingMode::TaskOnly || !s.all_split) continue;
    for (const auto& t : rep_.configurations) {
      if (t.mode != TrainingMode::TaskOnly || !t.all_split) continue;
      all.push_back({{"suite_trained", s.name},
                     {"task_only", t.name},
                     {"suite_trained_accuracy", s.all_split->value()},
                     {"task_only_accuracy", t.all_split->value()},
                     {"suite_trained_higher", s.all_split->value() > t.all_split->value()}});
    }
  }
  obs["all_split"] = all;
  json cov = json::array();
  std::map<std::string, std::map<std::string, double>, std::less<>> gaps;
  for (const auto& c : rep_.configurations) {
    if (c.mode == TrainingMode::TaskOnly) continue;
    for (const auto& a : c.aggregates) {
      const std::string prefix = c.task.value_or("");
      gaps[prefix][std::string(scheme_name(a.axis))] = a.gap();
      cov.push_back({{"configuration", c.name},
                     {"scheme", scheme_name(a.axis)},
                     {"mean_covered_accuracy", a.mean_covered_accuracy},
                     {"heldout_union_accuracy", a.heldout_union_accuracy.value()},
                     {"covered_higher", a.mean_covered_accuracy > a.heldout_union_accuracy.value()}});
    }
  }
  obs["covered_vs_heldout"] = cov;
  json order = json::array();
  for (const auto& [prefix, g] : gaps) {
    if (g.contains("ClassOut") && g.contains("IdentOut")) {
      order.push_back({{"training", prefix.empty() ? "suite-only" : prefix + " then suite"},
                       {"classout_gap", g.at("ClassOut")},
                       {"identout_gap", g.at("IdentOut")},
                       {"classout_gap_larger", g.at("ClassOut") > g.at("IdentOut")}});
    }
  }
  obs["gap_ordering"] = order;
  rep_.observations = obs;
}

void Runner::run() {
  fs::create_directories(cfg_.output_dir);
  load_inputs();
  build_plans();
  write_inputs();
  const bool task_models =
      cfg_.has_mode(TrainingMode::TaskOnly) || cfg_.has_mode(TrainingMode::Sequential);
  if (task_models) {
    for (const auto& t : tasks_) run_task_only(t);
  }
  if (suite_ && cfg_.has_mode(TrainingMode::SuiteOnly)) {
    for (auto axis : cfg_.axes) run_scheme(std::string(scheme_name(axis)), TrainingMode::SuiteOnly, nullptr, axis, nullptr);
  }
  if (suite_ && cfg_.has_mode(TrainingMode::Sequential)) {
    for (const auto& t : tasks_) {
      for (auto axis : cfg_.axes) {
        run_scheme(t.name + "-" + std::string(scheme_name(axis)), TrainingMode::Sequential, &t,
                   axis, &task_models_.at(t.name));
      }
    }
  }
  run_significance();
  run_delta_p();
  observe();
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.threads > 0) kernels::set_threads(config.threads);
  ExperimentReport report;
  Runner runner(config, report);
  try {
    runner.run();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    report.failure = FailureInfo{runner.stage_config, runner.stage_plan, e.what()};
  }
  return report;
}

}  // namespace behave
