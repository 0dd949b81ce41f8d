#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "behave/analysis.hpp"
#include "behave/evaluator.hpp"
#include "behave/experiment.hpp"
#include "behave/kernels.hpp"
#include "behave/report.hpp"
#include "behave/splitter.hpp"
#include "behave/stats.hpp"
#include "behave/suite.hpp"
#include "behave/synth.hpp"
#include "behave/task_data.hpp"
#include "behave/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace behave;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

json read_json_arg(const std::string& arg, const std::string& what) {
  if (arg.empty()) return json::object();
  std::string text = arg;
  if (trim(arg).front() != '{' && trim(arg).front() != '[') {
    std::ifstream in(arg, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + what + " " + arg);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error("cannot write " + out);
  f << j.dump(2) << "\n";
}

struct SuiteArgs {
  std::string path;
  std::string schema;
  std::string taxonomy;

  void add(CLI::App* app, bool required = true) {
    auto* o = app->add_option("--suite", path, "Suite file (delimited, or canonical .json)");
    if (required) o->required();
    app->add_option("--schema", schema, "Suite column schema (JSON text or file)");
    app->add_option("--taxonomy", taxonomy, "Taxonomy JSON (default: built-in HateCheck)");
  }

  TestSuite load() const {
    SuiteSchema s;
    if (!schema.empty()) {
      s = trim(schema).front() == '{' ? SuiteSchema::parse(schema) : SuiteSchema::load(schema);
    }
    const Taxonomy tax = taxonomy.empty() ? Taxonomy::hatecheck() : Taxonomy::load(taxonomy);
    return load_suite(path, s, tax);
  }
};

struct TaskArgs {
  std::string path;
  std::string collapse;
  std::string schema;
  std::string name;

  void add(CLI::App* app) {
    app->add_option("--task", path, "Task dataset file");
    app->add_option("--collapse", collapse, "Label collapse rule (JSON text or file)");
    app->add_option("--task-schema", schema, "Task column schema (JSON text or file)");
    app->add_option("--name", name, "Dataset name");
  }

  TaskDataset load() const {
    const CollapseRule rule =
        collapse.empty() ? CollapseRule::binary() : CollapseRule::from_json(read_json_arg(collapse, "collapse rule"));
    const TaskSchema ts = schema.empty() ? TaskSchema{} : TaskSchema::from_json(read_json_arg(schema, "task schema"));
    return load_task_dataset(path, rule, ts, name.empty() ? fs::path(path).stem().string() : name);
  }
};

GoldLabels read_gold_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read gold file " + path);
  GoldLabels g;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      throw Error(path + " line " + std::to_string(n) + ": malformed record");
    }
    const auto l = parse_label(j.at("label").get<std::string>());
    if (!l) throw Error(path + " line " + std::to_string(n) + ": unknown label");
    g.emplace_back(j.at("id").is_string() ? j["id"].get<std::string>() : j["id"].dump(), *l);
  }
  return g;
}

std::vector<SplitPlan> read_plans(const std::string& path) {
  const json j = read_json_arg(path, "plans");
  std::vector<SplitPlan> plans;
  if (j.is_array()) {
    for (const auto& p : j) plans.push_back(SplitPlan::from_json(p));
  } else {
    plans.push_back(SplitPlan::from_json(j));
  }
  return plans;
}

const SplitPlan& pick_plan(const std::vector<SplitPlan>& plans, const std::string& name) {
  if (name.empty()) {
    if (plans.size() != 1) throw ConfigError("--plan is required when the file holds several plans");
    return plans.front();
  }
  for (const auto& p : plans) {
    if (p.name() == name) return p;
  }
  throw ConfigError("no plan named '" + name + "'");
}

GoldLabels suite_gold(const TestSuite& suite, const std::vector<std::string>& ids) {
  GoldLabels g;
  if (ids.empty()) {
    for (const auto& c : suite.cases()) g.emplace_back(c.case_id, c.gold);
    return g;
  }
  for (const auto& id : ids) {
    const auto* c = suite.find(id);
    if (!c) throw Error("unknown case id " + id);
    g.emplace_back(id, c->gold);
  }
  return g;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"behave: behaviour-aware learning harness for functional test suites"};
  app.require_subcommand(1);
  std::string out;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load and validate a suite or task dataset");
  SuiteArgs ingest_suite;
  ingest_suite.add(ingest, false);
  TaskArgs ingest_task;
  ingest_task.add(ingest);
  std::string ingest_canonical;
  ingest->add_option("--canonical", ingest_canonical, "Write the suite in canonical JSON form");
  std::vector<double> ingest_ratios{0.8, 0.1, 0.1};
  ingest->add_option("--split", ingest_ratios, "Task split ratios")->expected(3);
  std::uint64_t ingest_seed = 0;
  ingest->add_option("--seed", ingest_seed, "Task split seed");
  ingest->add_option("-o,--out", out, "Summary output file (default stdout)");

  // split
  auto* split = app.add_subcommand("split", "Generate split plans for a suite");
  SuiteArgs split_suite;
  split_suite.add(split);
  std::string split_axis = "all";
  split->add_option("--axis", split_axis, "all, functionality, identity or class");
  std::uint64_t split_seed = 0;
  split->add_option("--seed", split_seed, "Master seed")->required();
  split->add_option("-o,--out", out, "Plans output file (default stdout)");

  // train
  auto* trn = app.add_subcommand("train", "Train a model on a task dataset or a suite plan");
  SuiteArgs train_suite;
  train_suite.add(trn, false);
  TaskArgs train_task;
  train_task.add(trn);
  std::string train_plans, train_plan, train_grid, train_features, train_init, train_model_out,
      train_predict_out;
  std::uint64_t train_seed = 0;
  trn->add_option("--plans", train_plans, "Plans file (suite training)");
  trn->add_option("--plan", train_plan, "Plan name within the plans file");
  trn->add_option("--grid", train_grid, "Grid spec (JSON text or file)");
  trn->add_option("--features", train_features, "Feature config (JSON text or file)");
  trn->add_option("--init", train_init, "Warm-start model checkpoint");
  trn->add_option("--seed", train_seed, "Training seed")->required();
  trn->add_option("--model-out", train_model_out, "Checkpoint output path")->required();
  trn->add_option("--predictions-out", train_predict_out,
                  "Write predictions for the evaluation cases (plan validation+test, or task test)");
  std::vector<double> train_ratios{0.8, 0.1, 0.1};
  trn->add_option("--split", train_ratios, "Task split ratios")->expected(3);
  int train_threads = 0;
  trn->add_option("--threads", train_threads, "OpenMP threads (0 = default)");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate predictions (internal or external JSONL)");
  SuiteArgs eval_suite;
  eval_suite.add(ev, false);
  std::string eval_predictions, eval_gold, eval_plans, eval_breakdown;
  ev->add_option("--predictions", eval_predictions, "Predictions JSONL ({id, p_hateful})")->required();
  ev->add_option("--gold", eval_gold, "Gold JSONL ({id, label})");
  ev->add_option("--plans", eval_plans, "Plans file: evaluate every plan and aggregate");
  ev->add_option("--breakdown", eval_breakdown, "Per-key accuracy along an axis");
  ev->add_option("-o,--out", out, "Output file (default stdout)");

  // compare
  auto* cmp = app.add_subcommand("compare", "Significance test between two prediction sets");
  SuiteArgs cmp_suite;
  cmp_suite.add(cmp, false);
  std::string cmp_a, cmp_b, cmp_gold, cmp_metric = "accuracy", cmp_two_sided = "double-tail",
                                    cmp_binomial = "paired";
  std::int64_t cmp_iterations = 10000;
  std::uint64_t cmp_seed = 0;
  double cmp_alpha = 0.05;
  cmp->add_option("--a", cmp_a, "Predictions of system A")->required();
  cmp->add_option("--b", cmp_b, "Predictions of system B")->required();
  cmp->add_option("--gold", cmp_gold, "Gold JSONL (default: every suite case)");
  cmp->add_option("--metric", cmp_metric, "accuracy (exact binomial) or macro_f1 (randomization)");
  cmp->add_option("--iterations", cmp_iterations, "Randomization iterations");
  cmp->add_option("--seed", cmp_seed, "Randomization seed");
  cmp->add_option("--alpha", cmp_alpha, "Significance level");
  cmp->add_option("--two-sided", cmp_two_sided, "double-tail or min-likelihood");
  cmp->add_option("--binomial", cmp_binomial, "paired or one-sample");
  cmp->add_option("-o,--out", out, "Output file (default stdout)");

  // analyze
  auto* an = app.add_subcommand("analyze", "Prediction change (delta p) and extreme samples");
  std::string an_before, an_after, an_gold;
  std::size_t an_k = 5;
  an->add_option("--before", an_before, "Predictions before suite fine-tuning")->required();
  an->add_option("--after", an_after, "Predictions after suite fine-tuning")->required();
  an->add_option("--gold", an_gold, "Gold JSONL ({id, label})")->required();
  an->add_option("--top-k", an_k, "Samples per category");
  an->add_option("-o,--out", out, "Output file (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "Run the full experiment pipeline from a config");
  std::string run_config, run_output;
  int run_threads = -1;
  std::string run_grid_mode;
  std::int64_t run_iterations = -1;
  run->add_option("config", run_config, "Experiment config (JSON)")->required();
  run->add_option("--output-dir", run_output, "Output directory (overrides env and config)");
  run->add_option("--threads", run_threads, "OpenMP threads (overrides config)");
  run->add_option("--grid-mode", run_grid_mode, "per-plan or shared (overrides config)");
  run->add_option("--iterations", run_iterations, "Randomization iterations (overrides config)");

  // verify
  auto* ver = app.add_subcommand("verify", "Recompute a written report from its prediction files");
  std::string ver_dir;
  ver->add_option("dir", ver_dir, "Report directory")->required();

  // synth
  auto* syn = app.add_subcommand("synth", "Write a synthetic suite and task corpora");
  std::string syn_dir;
  std::uint64_t syn_seed = 1;
  std::size_t syn_davidson = 24783, syn_founta = 20000;
  syn->add_option("dir", syn_dir, "Output directory")->required();
  syn->add_option("--seed", syn_seed, "Generator seed");
  syn->add_option("--davidson-size", syn_davidson, "Rows of the Davidson-style corpus");
  syn->add_option("--founta-size", syn_founta, "Rows of the Founta-style corpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*ingest) {
      json j;
      if (!ingest_suite.path.empty()) {
        const auto suite = ingest_suite.load();
        j["suite"] = validate_suite(suite).to_json();
        if (!ingest_canonical.empty()) {
          std::ofstream f(ingest_canonical, std::ios::binary);
          if (!f) throw Error("cannot write " + ingest_canonical);
          f << suite_to_json(suite).dump() << "\n";
        }
      }
      if (!ingest_task.path.empty()) {
        const auto ds = ingest_task.load();
        const auto sp = split_task(ds, {ingest_ratios[0], ingest_ratios[1], ingest_ratios[2]}, ingest_seed);
        j["task"] = {{"name", ds.name},
                     {"examples", ds.size()},
                     {"hateful", ds.class_counts[class_index(Label::Hateful)]},
                     {"non_hateful", ds.class_counts[class_index(Label::NonHateful)]},
                     {"hateful_fraction", ds.hateful_fraction()},
                     {"split", {sp.train.size(), sp.validation.size(), sp.test.size()}}};
      }
      if (j.empty()) throw ConfigError("ingest: give --suite and/or --task");
      emit(j, out);
      return kExitOk;
    }

    if (*split) {
      const auto suite = split_suite.load();
      const auto axis = parse_axis(split_axis);
      if (!axis) throw ConfigError("unknown axis '" + split_axis + "'");
      std::vector<SplitPlan> plans;
      if (*axis == Axis::None) plans.push_back(make_all_split(suite, split_seed));
      else plans = make_holdout_splits(suite, *axis, split_seed);
      json arr = json::array();
      for (const auto& p : plans) arr.push_back(p.to_json());
      emit(arr, out);
      std::cerr << plans.size() << " plan(s) for scheme " << scheme_name(*axis) << "\n";
      return kExitOk;
    }

    if (*trn) {
      if (train_threads > 0) kernels::set_threads(train_threads);
      const GridSpec grid = train_grid.empty() ? GridSpec{} : GridSpec::from_json(read_json_arg(train_grid, "grid"));
      FeatureConfig fc = train_features.empty() ? FeatureConfig{}
                                                : FeatureConfig::from_json(read_json_arg(train_features, "features"));
      std::optional<TrainedModel> init;
      if (!train_init.empty()) {
        init = TrainedModel::load(train_init);
        if (train_features.empty()) fc = init->config;
      }
      fc.validate();
      FeatureSet tr, va, ev_set;
      if (!train_suite.path.empty()) {
        if (train_plans.empty()) throw ConfigError("train: suite training needs --plans");
        const auto suite = train_suite.load();
        const auto plans = read_plans(train_plans);
        const auto& plan = pick_plan(plans, train_plan);
        auto make = [&](const std::vector<std::string>& ids, const std::string& part) {
          std::vector<std::string> texts;
          std::vector<Label> labels;
          for (const auto& id : ids) {
            const auto* c = suite.find(id);
            if (!c) throw Error("plan references unknown case " + id);
            texts.push_back(c->text);
            labels.push_back(c->gold);
          }
          return make_feature_set(plan.name() + "/" + part, fc, ids, texts, labels);
        };
        tr = make(plan.train, "train");
        va = make(plan.validation, "validation");
        std::vector<std::string> eval_ids = plan.validation;
        eval_ids.insert(eval_ids.end(), plan.test.begin(), plan.test.end());
        ev_set = make(eval_ids, "eval");
      } else if (!train_task.path.empty()) {
        const auto ds = train_task.load();
        const auto sp = split_task(ds, {train_ratios[0], train_ratios[1], train_ratios[2]}, train_seed);
        auto make = [&](const std::vector<std::size_t>& pos, const std::string& part) {
          std::vector<std::string> ids, texts;
          std::vector<Label> labels;
          for (auto i : pos) {
            ids.push_back(ds.examples[i].example_id);
            texts.push_back(ds.examples[i].text);
            labels.push_back(ds.examples[i].label);
          }
          return make_feature_set(ds.name + "/" + part, fc, ids, texts, labels);
        };
        tr = make(sp.train, "train");
        va = make(sp.validation, "validation");
        ev_set = make(sp.test, "test");
      } else {
        throw ConfigError("train: give --suite with --plans, or --task");
      }
      const auto gr = grid_search(tr, va, grid, train_seed, init ? &*init : nullptr);
      gr.model.save(train_model_out);
      if (!train_predict_out.empty()) predict(gr.model, ev_set).write_jsonl(train_predict_out);
      json pts = json::array();
      for (const auto& p : gr.points) {
        pts.push_back({{"hyperparameters", p.hyperparams.to_json()},
                       {"validation_loss", p.validation_loss ? json(*p.validation_loss) : json(nullptr)},
                       {"error", p.error}});
      }
      std::cout << json{{"selected", gr.selected},
                        {"hyperparameters", gr.hyperparams.to_json()},
                        {"validation_loss", gr.validation_loss},
                        {"grid", pts}}
                       .dump(2)
                << "\n";
      return kExitOk;
    }

    if (*ev) {
      const auto preds = load_external_predictions(eval_predictions);
      json j;
      if (!eval_plans.empty()) {
        if (eval_suite.path.empty()) throw ConfigError("eval: --plans needs --suite");
        const auto suite = eval_suite.load();
        const auto plans = read_plans(eval_plans);
        std::vector<PlanEval> evals;
        json pj = json::array();
        for (const auto& p : plans) {
          evals.push_back(evaluate_plan(preds, p, suite));
          pj.push_back(evals.back().to_json());
        }
        j["plans"] = pj;
        if (plans.front().axis != Axis::None) j["aggregate"] = aggregate_holdout(evals).to_json();
      } else {
        GoldLabels gold;
        std::optional<TestSuite> suite;
        if (!eval_gold.empty()) gold = read_gold_jsonl(eval_gold);
        else if (!eval_suite.path.empty()) {
          suite = eval_suite.load();
          gold = suite_gold(*suite, {});
        } else {
          throw ConfigError("eval: give --gold, --suite or --plans");
        }
        const auto recs = align_covering(preds, gold);
        j["accuracy"] = fraction_json(accuracy(recs));
        j["f1"] = f1_scores(recs).to_json();
        if (!eval_breakdown.empty()) {
          if (!suite) throw ConfigError("eval: --breakdown needs --suite");
          const auto axis = parse_axis(eval_breakdown);
          if (!axis || *axis == Axis::None) throw ConfigError("eval: bad breakdown axis");
          json rows = json::array();
          for (const auto& r : breakdown(preds, *suite, *axis)) {
            rows.push_back({{"key", r.key}, {"accuracy", fraction_json(r.accuracy)}});
          }
          j["breakdown"] = rows;
        }
      }
      emit(j, out);
      return kExitOk;
    }

    if (*cmp) {
      const auto a = load_external_predictions(cmp_a);
      const auto b = load_external_predictions(cmp_b);
      GoldLabels gold;
      if (!cmp_gold.empty()) gold = read_gold_jsonl(cmp_gold);
      else if (!cmp_suite.path.empty()) gold = suite_gold(cmp_suite.load(), {});
      else throw ConfigError("compare: give --gold or --suite");
      TwoSidedRule rule;
      if (cmp_two_sided == "double-tail") rule = TwoSidedRule::DoubleTail;
      else if (cmp_two_sided == "min-likelihood") rule = TwoSidedRule::MinLikelihood;
      else throw ConfigError("compare: --two-sided must be double-tail or min-likelihood");
      SignificanceResult r;
      const auto metric = ascii_lower(cmp_metric);
      if (metric == "accuracy") {
        if (cmp_binomial == "paired") {
          r = binomial_paired_test(a, b, gold, rule);
        } else if (cmp_binomial == "one-sample") {
          const auto ra = align_covering(a, gold);
          const auto rb = align_covering(b, gold);
          const auto fa = accuracy(ra), fb = accuracy(rb);
          r = binomial_one_sample_test(fa.numerator, fa.denominator, fb.value(), rule);
        } else {
          throw ConfigError("compare: --binomial must be paired or one-sample");
        }
      } else if (metric == "macro_f1") {
        r = randomization_test_macro_f1(a, b, gold, cmp_iterations, cmp_seed);
      } else {
        throw ConfigError("compare: --metric must be accuracy or macro_f1");
      }
      json j = r.to_json();
      j["alpha"] = cmp_alpha;
      j["significant"] = decide(r, cmp_alpha);
      emit(j, out);
      return kExitOk;
    }

    if (*an) {
      const auto before = load_external_predictions(an_before);
      const auto after = load_external_predictions(an_after);
      const auto gold = read_gold_jsonl(an_gold);
      const auto recs = delta_p(before, after, gold);
      const auto sel = select_extremes(recs);
      const auto top = top_k_extremes(recs, an_k);
      json j;
      j["n"] = recs.size();
      json ext = json::object();
      for (std::size_t ci = 0; ci < 4; ++ci) {
        json rows = json::array();
        for (auto i : top[ci]) rows.push_back(recs[i].to_json());
        ext[std::string(to_string(kExtremeCategories[ci]))] = {{"selected", sel.id[ci]}, {"top", rows}};
      }
      j["extremes"] = ext;
      emit(j, out);
      return kExitOk;
    }

    if (*run) {
      auto cfg = ExperimentConfig::load(run_config);
      if (const char* env = std::getenv("BEHAVE_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
      if (!run_output.empty()) cfg.output_dir = run_output;
      if (run_threads >= 0) cfg.threads = run_threads;
      if (!run_grid_mode.empty()) {
        if (run_grid_mode == "shared") cfg.grid_mode = GridMode::Shared;
        else if (run_grid_mode == "per-plan") cfg.grid_mode = GridMode::PerPlan;
        else throw ConfigError("--grid-mode must be per-plan or shared");
      }
      if (run_iterations >= 0) cfg.significance.iterations = run_iterations;
      const std::string started = timestamp();
      const auto report = run_experiment(cfg);
      json info = {{"started_at", started},
                   {"finished_at", timestamp()},
                   {"threads", kernels::max_threads()},
                   {"config", fs::absolute(run_config).string()},
                   {"output_dir", fs::absolute(cfg.output_dir).string()}};
      emit_report(report, cfg.output_dir, {}, info);
      if (report.failure) {
        std::cerr << "run failed in " << report.failure->configuration;
        if (!report.failure->plan.empty()) std::cerr << " (" << report.failure->plan << ")";
        std::cerr << ": " << report.failure->message << "\nmanifest: "
                  << (cfg.output_dir / "manifest.json").string() << "\n";
        return kExitRuntime;
      }
      std::cerr << "report written to " << cfg.output_dir.string() << "\n";
      return kExitOk;
    }

    if (*ver) {
      const auto r = verify_report(ver_dir);
      for (const auto& m : r.mismatches) std::cerr << "mismatch: " << m << "\n";
      std::cout << json{{"checked", r.checked}, {"mismatches", r.mismatches.size()}, {"ok", r.ok()}}.dump()
                << "\n";
      return r.ok() ? kExitOk : kExitRuntime;
    }

    if (*syn) {
      fs::create_directories(syn_dir);
      const auto suite = synth_hatecheck(syn_seed);
      write_hatecheck_csv(suite, fs::path(syn_dir) / "hatecheck_synthetic.csv");
      const TaskCorpusSpec d{"Davidson", TaskStyle::Davidson, syn_davidson, 0.058};
      const TaskCorpusSpec f{"Founta", TaskStyle::Founta, syn_founta, 0.050};
      write_task_csv(d, synth_task_corpus(d, syn_seed), fs::path(syn_dir) / "davidson_synthetic.csv");
      write_task_csv(f, synth_task_corpus(f, syn_seed), fs::path(syn_dir) / "founta_synthetic.csv");
      const json config = {
          {"master_seed", syn_seed},
          {"suite", {{"path", "hatecheck_synthetic.csv"}}},
          {"tasks",
           {{{"name", d.name},
             {"path", "davidson_synthetic.csv"},
             {"schema", task_schema_for(d.style).to_json()},
             {"collapse", collapse_rule_for(d.style).to_json()}},
            {{"name", f.name},
             {"path", "founta_synthetic.csv"},
             {"schema", task_schema_for(f.style).to_json()},
             {"collapse", collapse_rule_for(f.style).to_json()}}}},
          {"output_dir", "out"}};
      emit(config, (fs::path(syn_dir) / "config.json").string());
      std::cerr << "wrote synthetic suite (" << suite.size() << " cases) and task corpora to " << syn_dir
                << "\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
