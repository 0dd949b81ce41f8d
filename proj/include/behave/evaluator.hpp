#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "behave/common.hpp"
#include "behave/splitter.hpp"
#include "behave/suite.hpp"
#include "behave/trainer.hpp"

namespace behave {

/// One prediction aligned with its gold label.
struct Record {
  std::string id;
  Label predicted = Label::NonHateful;
  Label gold = Label::NonHateful;

  bool correct() const { return predicted == gold; }
  friend bool operator==(const Record&, const Record&) = default;
};

using GoldLabels = std::vector<std::pair<std::string, Label>>;
using HardPredictions = std::map<std::string, Label, std::less<>>;

HardPredictions hard_predictions(const PredictionSet& preds);

/// Aligns predictions with gold in gold order. The id sets must match exactly;
/// every missing and extra id is listed in the error.
std::vector<Record> align_exact(const HardPredictions& preds, const GoldLabels& gold);
/// Aligns a superset of predictions with gold; throws naming missing ids.
std::vector<Record> align_covering(const PredictionSet& preds, const GoldLabels& gold);

Fraction accuracy(std::span<const Record> records);
Fraction accuracy(const HardPredictions& preds, const GoldLabels& gold);

/// Counts with hateful as the positive class.
struct Confusion {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  static Confusion of(std::span<const Record> records);
  std::int64_t total() const { return tp + fp + fn + tn; }
};

struct F1Scores {
  /// Indexed by class_index(Label).
  std::array<double, kNumClasses> per_class{};
  double macro = 0.0;
  double micro = 0.0;
  Confusion confusion;

  nlohmann::json to_json() const;
};

/// Per-class F1 = 2PR/(P+R) with 0/0 taken as 0; macro is the unweighted mean
/// over both classes; micro pools the per-class counts.
F1Scores f1_scores(std::span<const Record> records);
F1Scores f1_scores(const HardPredictions& preds, const GoldLabels& gold);

double macro_f1(std::span<const Label> predicted, std::span<const Label> gold);

struct PlanEval {
  std::string plan;
  Axis axis = Axis::None;
  std::optional<std::string> key;
  Fraction covered_test_accuracy;
  Fraction full_test_accuracy;
  std::vector<Record> covered_test_records;
  std::vector<Record> heldout_test_predictions;
  /// Held-out cases on the validation side; logged, not part of the headline.
  std::optional<Fraction> heldout_validation_accuracy;

  nlohmann::json to_json(bool with_records = false) const;
};

PlanEval evaluate_plan(const PredictionSet& preds, const SplitPlan& plan, const TestSuite& suite);

struct AggregateReport {
  struct KeyRow {
    std::string key;
    Fraction covered;
    Fraction heldout;
  };
  Axis axis = Axis::None;
  Fraction heldout_union_accuracy;
  double mean_covered_accuracy = 0.0;
  std::size_t plans = 0;
  std::vector<KeyRow> per_key;

  double gap() const { return mean_covered_accuracy - heldout_union_accuracy.value(); }
  nlohmann::json to_json() const;
};

/// Held-out accuracy over the concatenation of every plan's held-out test
/// predictions; covered accuracy as the unweighted mean over plans.
AggregateReport aggregate_holdout(std::span<const PlanEval> evals);

struct BreakdownRow {
  std::string key;
  Fraction accuracy;
};

/// Accuracy per key along `axis` over the suite (or the listed case ids).
/// Keys without cases are omitted; identity ignores cases without a target.
std::vector<BreakdownRow> breakdown(const PredictionSet& preds, const TestSuite& suite, Axis axis,
                                    std::span<const std::string> case_ids = {});

nlohmann::json fraction_json(const Fraction& f);

}  // namespace behave
