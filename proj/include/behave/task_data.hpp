#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "behave/common.hpp"

namespace behave {

struct TaskExample {
  std::string example_id;
  std::string text;
  Label label = Label::NonHateful;
};

/// Raw label -> binary label mapping (keys compared after trim+lowercase).
struct CollapseRule {
  std::map<std::string, Label, std::less<>> mapping;

  /// Identity rule for data that is already binary.
  static CollapseRule binary();
  static CollapseRule from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Throws naming the raw label when it is not covered.
  Label apply(std::string_view raw) const;
};

struct TaskSchema {
  std::string id = "id";   // optional column; row number is used when absent
  std::string text = "text";
  std::string label = "label";
  char delimiter = ',';

  static TaskSchema from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct TaskDataset {
  std::string name;
  std::vector<TaskExample> examples;
  std::array<std::size_t, kNumClasses> class_counts{};

  double hateful_fraction() const;
  std::size_t size() const { return examples.size(); }
};

TaskDataset load_task_dataset(const std::filesystem::path& path, const CollapseRule& collapse,
                              const TaskSchema& schema = {}, std::string name = {});
TaskDataset make_task_dataset(std::string name, std::vector<TaskExample> examples);

/// Positions into TaskDataset::examples; the three sets partition the dataset.
struct TaskSplits {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

/// Seeded uniform shuffle followed by floor sizing of the first two parts; the
/// last part takes the remainder. With `stratified`, each label is split
/// separately with the same rule and the parts are concatenated.
TaskSplits split_task(const TaskDataset& dataset, std::array<double, 3> ratios,
                      std::uint64_t seed, bool stratified = false);

/// Three-file mode: datasets already split upstream, concatenated in order
/// train, validation, test. Example ids must be unique across the three files.
std::pair<TaskDataset, TaskSplits> join_presplit(std::string name, const TaskDataset& train,
                                                 const TaskDataset& validation,
                                                 const TaskDataset& test);

std::vector<TaskExample> select(const TaskDataset& dataset, const std::vector<std::size_t>& pos);

}  // namespace behave
