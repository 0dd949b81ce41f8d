#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "behave/analysis.hpp"
#include "behave/common.hpp"
#include "behave/evaluator.hpp"
#include "behave/features.hpp"
#include "behave/splitter.hpp"
#include "behave/stats.hpp"
#include "behave/suite.hpp"
#include "behave/task_data.hpp"
#include "behave/trainer.hpp"

namespace behave {

inline constexpr std::string_view kVersion = "0.1.0";

struct SuiteSource {
  std::filesystem::path path;
  SuiteSchema schema;
  std::optional<std::filesystem::path> taxonomy;
};

struct TaskSource {
  std::string name;
  /// Single-file mode, split with `ratios`.
  std::optional<std::filesystem::path> path;
  /// Three-file mode: train, validation, test.
  std::optional<std::array<std::filesystem::path, 3>> presplit;
  TaskSchema schema;
  CollapseRule collapse = CollapseRule::binary();
  std::array<double, 3> ratios{0.8, 0.1, 0.1};
  bool stratified = false;
};

enum class TrainingMode : std::uint8_t { TaskOnly, SuiteOnly, Sequential };
std::string_view to_string(TrainingMode m);

enum class GridMode : std::uint8_t { PerPlan, Shared };

enum class Metric : std::uint8_t { Accuracy, MacroF1 };
std::string_view to_string(Metric m);

/// One significance test between two configurations on one test set. The test
/// set is "All", a held-out scheme ("FuncOut", "IdentOut", "ClassOut") or a
/// task dataset name.
struct ComparisonSpec {
  std::string a;
  std::string b;
  std::string test_set;
  Metric metric = Metric::Accuracy;

  nlohmann::json to_json() const;
};

struct SignificanceConfig {
  double alpha = 0.05;
  std::int64_t iterations = 10000;
  TwoSidedRule rule = TwoSidedRule::DoubleTail;
  /// Accuracy comparisons: paired exact binomial (default) or one-sample
  /// against the accuracy of system B.
  bool one_sample = false;
  /// Generate the standard comparison inventory from the configurations run.
  bool use_defaults = true;
  std::vector<ComparisonSpec> comparisons;
};

struct ExperimentConfig {
  std::uint64_t master_seed = 0;
  std::optional<SuiteSource> suite;
  std::vector<TaskSource> tasks;
  /// Axis::None stands for the All scheme.
  std::vector<Axis> axes{Axis::None, Axis::Functionality, Axis::Identity, Axis::Class};
  std::vector<TrainingMode> modes{TrainingMode::TaskOnly, TrainingMode::SuiteOnly,
                                  TrainingMode::Sequential};
  FeatureConfig features;
  GridSpec grid;
  GridMode grid_mode = GridMode::PerPlan;
  SignificanceConfig significance;
  std::size_t top_k = 5;
  std::filesystem::path output_dir = "behave-out";
  int threads = 0;
  bool save_models = false;
  /// The parsed document, echoed into the report.
  nlohmann::json echo;

  /// Relative paths are resolved against `base_dir`. Throws ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j,
                                    const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);
  /// Semantic checks: referenced files exist, modes have their inputs, names are unique.
  void validate() const;
  bool has_mode(TrainingMode m) const;
  bool has_axis(Axis a) const;
};

struct PlanResult {
  std::string plan;
  HyperParams hyperparams;
  std::optional<double> validation_loss;
  PlanEval eval;
  std::string predictions_file;
};

/// One trained configuration: a task-only model ("Davidson"), a suite-only
/// scheme ("FuncOut") or a sequential scheme ("Davidson-FuncOut").
struct ConfigurationResult {
  std::string name;
  TrainingMode mode = TrainingMode::TaskOnly;
  std::optional<std::string> task;
  std::optional<Axis> scheme;

  /// Task-only model selection.
  std::optional<HyperParams> hyperparams;
  std::optional<double> validation_loss;

  std::vector<PlanResult> plans;
  std::map<std::string, PredictionSet, std::less<>> plan_predictions;
  std::optional<PredictionSet> suite_predictions;
  std::map<std::string, PredictionSet, std::less<>> task_predictions;
  std::map<std::string, std::string, std::less<>> prediction_files;

  std::optional<Fraction> all_split;
  std::vector<AggregateReport> aggregates;
  std::vector<std::pair<std::string, F1Scores>> task_test;

  nlohmann::json to_json() const;
};

struct SignificanceRow {
  ComparisonSpec spec;
  SignificanceResult result;
  bool significant = false;

  nlohmann::json to_json() const;
};

struct DeltaTable {
  std::string task;
  std::string before;
  std::string after;
  std::vector<DeltaRecord> records;
  std::map<std::string, std::string, std::less<>> texts;
  std::array<std::vector<std::size_t>, 4> top;

  nlohmann::json to_json() const;
};

struct FailureInfo {
  std::string configuration;
  std::string plan;
  std::string message;
};

struct ExperimentReport {
  nlohmann::json provenance;
  /// Scheme name -> plans, in generation order.
  std::map<std::string, std::vector<SplitPlan>, std::less<>> plans;
  std::vector<ConfigurationResult> configurations;
  std::vector<SignificanceRow> significance;
  std::vector<DeltaTable> deltas;
  nlohmann::json observations = nlohmann::json::object();
  nlohmann::json artifacts = nlohmann::json::object();
  std::vector<std::string> notes;
  std::optional<FailureInfo> failure;

  const ConfigurationResult* find(std::string_view name) const;
  /// Deterministic report document (no timestamps, no thread counts).
  nlohmann::json body() const;
};

/// Runs every requested configuration and writes predictions, plans and gold
/// files below config.output_dir. Runtime failures are recorded in
/// report.failure (with the results completed so far); ConfigError propagates.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// The standard comparison inventory for the configurations in a report.
std::vector<ComparisonSpec> default_comparisons(const ExperimentReport& report,
                                                const ExperimentConfig& config);

/// Aligned label vectors of two configurations on a test set.
struct AlignedPair {
  std::vector<Label> a;
  std::vector<Label> b;
  std::vector<Label> gold;
};
AlignedPair align_for_comparison(const ExperimentReport& report, const ComparisonSpec& spec,
                                 const TestSuite* suite,
                                 const std::map<std::string, GoldLabels, std::less<>>& task_gold);

SignificanceRow run_comparison(const ExperimentReport& report, const ComparisonSpec& spec,
                               const SignificanceConfig& sig, std::uint64_t master_seed,
                               const TestSuite* suite,
                               const std::map<std::string, GoldLabels, std::less<>>& task_gold);

/// File-system safe form of a report key.
std::string file_stem(std::string_view name);

}  // namespace behave
