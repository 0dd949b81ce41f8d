#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "behave/common.hpp"
#include "behave/suite.hpp"

namespace behave {

/// One train/validation/test partition of a suite, optionally with a held-out group.
struct SplitPlan {
  Axis axis = Axis::None;
  std::optional<std::string> key;
  std::uint64_t seed = 0;
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;

  /// Report key, e.g. "All", "FuncOut/F14", "IdentOut/women".
  std::string name() const;
  bool is_heldout(const TestCase& c, const TestSuite& suite) const;

  nlohmann::json to_json() const;
  static SplitPlan from_json(const nlohmann::json& j);
  friend bool operator==(const SplitPlan&, const SplitPlan&) = default;
};

/// 50/25/25 split with no held-out group.
SplitPlan make_all_split(const TestSuite& suite, std::uint64_t master_seed);

/// One plan per key along `axis`. For each key the matching cases are held out,
/// the rest is split 50/50 into train and evaluation, and held-out plus
/// evaluation cases are split 50/50 into validation and test. Odd counts give
/// the extra case to the earlier part (train, validation).
std::vector<SplitPlan> make_holdout_splits(const TestSuite& suite, Axis axis,
                                           std::uint64_t master_seed);

/// Single plan for one key; used by make_holdout_splits.
SplitPlan make_holdout_split(const TestSuite& suite, Axis axis, const std::string& key,
                             std::uint64_t master_seed);

/// Plan seed derived from the master seed, axis and key.
std::uint64_t plan_seed(std::uint64_t master_seed, Axis axis, const std::string& key);

/// Partition and holdout-purity violations; empty when the plan is sound.
std::vector<std::string> check_plan(const SplitPlan& plan, const TestSuite& suite);

}  // namespace behave
