#include <doctest.h>

#include <fstream>
#include <sstream>

#include "behave/experiment.hpp"
#include "behave/kernels.hpp"
#include "behave/report.hpp"
#include "behave/synth.hpp"
#include "helpers.hpp"

using namespace behave;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path workspace(const std::string& name) {
  const auto dir = test::scratch_dir(name);
  write_hatecheck_csv(synth_hatecheck(1), dir / "suite.csv");
  for (const auto& spec : {TaskCorpusSpec{"Davidson", TaskStyle::Davidson, 600, 0.1},
                           TaskCorpusSpec{"Founta", TaskStyle::Founta, 500, 0.1}}) {
    write_task_csv(spec, synth_task_corpus(spec, 2), dir / (spec.name + ".csv"));
  }
  return dir;
}

json small_config(const fs::path& dir) {
  return {{"master_seed", 17},
          {"suite", {{"path", (dir / "suite.csv").string()}}},
          {"tasks",
           {{{"name", "Davidson"},
             {"path", (dir / "Davidson.csv").string()},
             {"schema", task_schema_for(TaskStyle::Davidson).to_json()},
             {"collapse", collapse_rule_for(TaskStyle::Davidson).to_json()}},
            {{"name", "Founta"},
             {"path", (dir / "Founta.csv").string()},
             {"schema", task_schema_for(TaskStyle::Founta).to_json()},
             {"collapse", collapse_rule_for(TaskStyle::Founta).to_json()}}}},
          {"axes", {"none", "identity"}},
          {"features", {{"dimension", 1024}, {"word_orders", {1}}, {"char_orders", {3}}}},
          {"grid", {{"learning_rates", {0.1}}, {"batch_sizes", {64}}, {"epochs", {2}}}},
          {"grid_mode", "shared"},
          {"significance", {{"iterations", 200}}},
          {"output_dir", (dir / "out").string()}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("file stems") {
    CHECK(file_stem("FuncOut/F14") == "FuncOut_F14");
    CHECK(file_stem("IdentOut/trans people") == "IdentOut_trans_people");
    CHECK(file_stem("Davidson-All") == "Davidson-All");
  }

  TEST_CASE("config errors") {
    const auto dir = workspace("exp-config");
    auto base = small_config(dir);
    CHECK_NOTHROW(ExperimentConfig::from_json(base).validate());

    auto no_seed = base;
    no_seed.erase("master_seed");
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(no_seed), doctest::Contains("master_seed"), ConfigError);

    auto unknown = base;
    unknown["colour"] = "blue";
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(unknown), doctest::Contains("colour"), ConfigError);

    auto nested = base;
    nested["features"]["ngram"] = 3;
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(nested), doctest::Contains("ngram"), ConfigError);
    nested = base;
    nested["grid"]["base"] = {{"lr", 0.1}};
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(nested), doctest::Contains("lr"), ConfigError);

    auto missing_file = base;
    missing_file["suite"]["path"] = (dir / "nope.csv").string();
    CHECK_THROWS_AS(ExperimentConfig::from_json(missing_file).validate(), ConfigError);

    auto dup = base;
    dup["tasks"][1]["name"] = "Davidson";
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(dup).validate(), doctest::Contains("duplicate"), ConfigError);

    auto clash = base;
    clash["tasks"][1]["name"] = "All";
    CHECK_THROWS_AS(ExperimentConfig::from_json(clash).validate(), ConfigError);

    auto bad_cmp = base;
    bad_cmp["significance"]["comparisons"] = {{{"a", "Davidson-FuncOut"}, {"b", "Davidson"}, {"test_set", "FuncOut"}}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_cmp).validate(), ConfigError);

    auto bad_axis = base;
    bad_axis["axes"] = {"sideways"};
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_axis), ConfigError);

    auto bad_alpha = base;
    bad_alpha["significance"]["alpha"] = 1.5;
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_alpha).validate(), ConfigError);

    auto no_suite = base;
    no_suite.erase("suite");
    CHECK_THROWS_AS(ExperimentConfig::from_json(no_suite).validate(), ConfigError);
  }

  TEST_CASE("relative paths resolve against the config directory") {
    const auto dir = workspace("exp-relative");
    auto cfg = small_config(dir);
    cfg["suite"]["path"] = "suite.csv";
    cfg["output_dir"] = "out";
    {
      std::ofstream f(dir / "cfg.json");
      f << cfg.dump();
    }
    const auto c = ExperimentConfig::load(dir / "cfg.json");
    CHECK(c.suite->path == dir / "suite.csv");
    CHECK(c.output_dir == dir / "out");
  }

  TEST_CASE("task-only run with no axes reports task scores only") {
    const auto dir = workspace("exp-taskonly");
    auto cfg = small_config(dir);
    cfg.erase("suite");
    cfg["axes"] = json::array();
    cfg["modes"] = {"task-only"};
    const auto report = run_experiment(ExperimentConfig::from_json(cfg));
    REQUIRE_FALSE(report.failure);
    REQUIRE(report.configurations.size() == 2);
    for (const auto& c : report.configurations) {
      CHECK(c.task_test.size() == 2);
      CHECK_FALSE(c.all_split);
      CHECK(c.aggregates.empty());
    }
    CHECK(report.plans.empty());
  }

  TEST_CASE("pipeline: report contents, determinism across threads, verification") {
    const auto dir = workspace("exp-full");
    auto cfg_json = small_config(dir);
    auto cfg = ExperimentConfig::from_json(cfg_json);
    cfg.threads = 1;
    const auto r1 = run_experiment(cfg);
    REQUIRE_FALSE(r1.failure);
    emit_report(r1, dir / "out");

    CHECK(r1.plans.at("IdentOut").size() == 7);
    CHECK(r1.plans.at("All").size() == 1);
    const auto* seq = r1.find("Davidson-IdentOut");
    REQUIRE(seq != nullptr);
    CHECK(seq->plans.size() == 7);
    REQUIRE(seq->aggregates.size() == 1);
    CHECK(seq->aggregates[0].axis == Axis::Identity);
    const auto* task = r1.find("Davidson");
    REQUIRE(task != nullptr);
    CHECK(task->task_test.size() == 2);
    CHECK(task->all_split.has_value());
    CHECK_FALSE(r1.significance.empty());
    CHECK(r1.deltas.size() == 2);
    const auto body = r1.body();
    CHECK(body.at("format") == "behave-report/1");
    CHECK(body.at("status") == "complete");

    const auto v = verify_report(dir / "out");
    CHECK(v.checked > 0);
    CHECK(v.ok());
    for (const auto& m : v.mismatches) MESSAGE(m);

    const std::string first = slurp(dir / "out" / "report.json");
    const std::string md = slurp(dir / "out" / "report.md");
    CHECK(md.find("| Compared approaches | Test set | Evaluation metric | p-value |") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "significance.csv"));
    CHECK(fs::exists(dir / "out" / "fig2_all_split.csv"));
    CHECK(fs::exists(dir / "out" / "manifest.json"));

    cfg.threads = 3;
    cfg.output_dir = dir / "out3";
    const auto r2 = run_experiment(cfg);
    emit_report(r2, dir / "out3");
    kernels::set_threads(1);
    CHECK(slurp(dir / "out3" / "report.json") == first);
    CHECK(slurp(dir / "out3" / "report.md") == md);
  }

  TEST_CASE("verify detects tampering") {
    const auto dir = workspace("exp-tamper");
    auto cfg = small_config(dir);
    cfg["axes"] = {"none"};
    cfg["tasks"].erase(1);
    const auto report = run_experiment(ExperimentConfig::from_json(cfg));
    emit_report(report, dir / "out");
    REQUIRE(verify_report(dir / "out").ok());
    const auto preds = dir / "out" / "predictions" / "All" / "All.jsonl";
    REQUIRE(fs::exists(preds));
    std::string text = slurp(preds);
    std::string flipped;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      auto j = json::parse(line);
      j["p_hateful"] = 1.0 - j["p_hateful"].get<double>();
      flipped += j.dump() + "\n";
    }
    {
      std::ofstream f(preds, std::ios::binary);
      f << flipped;
    }
    CHECK_FALSE(verify_report(dir / "out").ok());
  }

  TEST_CASE("runtime failure is recorded with the failing configuration") {
    const auto dir = workspace("exp-failure");
    auto cfg = small_config(dir);
    cfg["axes"] = {"none"};
    cfg["grid"]["learning_rates"] = {1e300};
    const auto report = run_experiment(ExperimentConfig::from_json(cfg));
    REQUIRE(report.failure.has_value());
    CHECK_FALSE(report.failure->configuration.empty());
    CHECK(report.body().at("status") == "failed");
    emit_report(report, dir / "out");
    const auto manifest = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest.at("status") == "failed");
  }

  TEST_CASE("empty significance section is noted in the manifest") {
    const auto dir = workspace("exp-nosig");
    auto cfg = small_config(dir);
    cfg["axes"] = {"none"};
    cfg["modes"] = {"task-only", "suite-only"};
    cfg["significance"]["comparisons"] = "none";
    const auto report = run_experiment(ExperimentConfig::from_json(cfg));
    CHECK(report.significance.empty());
    emit_report(report, dir / "out");
    const auto manifest = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest.at("significance_table") == "omitted");
    CHECK_FALSE(fs::exists(dir / "out" / "significance.csv"));
    CHECK(slurp(dir / "out" / "report.md").find("Compared approaches") == std::string::npos);
  }
}
