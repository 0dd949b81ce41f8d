#include "behave/splitter.hpp"

#include <set>
#include <span>
#include <unordered_map>

#include "behave/rng.hpp"

namespace behave {

using nlohmann::json;

std::string SplitPlan::name() const {
  std::string n(scheme_name(axis));
  if (key) n += "/" + *key;
  return n;
}

bool SplitPlan::is_heldout(const TestCase& c, const TestSuite& suite) const {
  if (axis == Axis::None || !key) return false;
  const auto k = suite.key_of(c, axis);
  return k && *k == *key;
}

json SplitPlan::to_json() const {
  return {{"axis", to_string(axis)},
          {"key", key ? json(*key) : json(nullptr)},
          {"seed", seed},
          {"train", train},
          {"validation", validation},
          {"test", test}};
}

SplitPlan SplitPlan::from_json(const json& j) {
  SplitPlan p;
  try {
    const auto axis = parse_axis(j.at("axis").get<std::string>());
    if (!axis) throw Error("plan json: unknown axis");
    p.axis = *axis;
    if (!j.at("key").is_null()) p.key = j["key"].get<std::string>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.train = j.at("train").get<std::vector<std::string>>();
    p.validation = j.at("validation").get<std::vector<std::string>>();
    p.test = j.at("test").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(std::string("plan json: ") + e.what());
  }
  return p;
}

std::uint64_t plan_seed(std::uint64_t master_seed, Axis axis, const std::string& key) {
  return derive_seed(master_seed, "plan", to_string(axis), key);
}

namespace {

// Splits `ids` (already shuffled) into halves; the first half gets the odd case.
std::pair<std::span<const std::string>, std::span<const std::string>> halve(
    const std::vector<std::string>& ids) {
  const std::size_t first = (ids.size() + 1) / 2;
  std::span<const std::string> all(ids);
  return {all.first(first), all.subspan(first)};
}

SplitPlan build(const TestSuite& suite, Axis axis, std::optional<std::string> key,
                std::uint64_t seed) {
  std::vector<std::string> held, rest;
  for (const auto& c : suite.cases()) {
    const bool h = key && suite.key_of(c, axis) == key;
    (h ? held : rest).push_back(c.case_id);
  }
  if (rest.empty()) throw Error("split " + std::string(scheme_name(axis)) + ": no cases remain after holding out '" + key.value_or("") + "'");

  SplitPlan plan;
  plan.axis = axis;
  plan.key = std::move(key);
  plan.seed = seed;

  Rng rng(seed);
  rng.shuffle(std::span<std::string>(rest));
  auto [train, eval] = halve(rest);
  plan.train.assign(train.begin(), train.end());

  std::vector<std::string> pool = std::move(held);
  pool.insert(pool.end(), eval.begin(), eval.end());
  rng.shuffle(std::span<std::string>(pool));
  auto [val, test] = halve(pool);
  plan.validation.assign(val.begin(), val.end());
  plan.test.assign(test.begin(), test.end());
  return plan;
}

}  // namespace

SplitPlan make_all_split(const TestSuite& suite, std::uint64_t master_seed) {
  if (suite.size() == 0) throw Error("split All: empty suite");
  return build(suite, Axis::None, std::nullopt, plan_seed(master_seed, Axis::None, ""));
}

SplitPlan make_holdout_split(const TestSuite& suite, Axis axis, const std::string& key,
                             std::uint64_t master_seed) {
  if (axis == Axis::None) throw Error("holdout split requires an axis");
  return build(suite, axis, key, plan_seed(master_seed, axis, key));
}

std::vector<SplitPlan> make_holdout_splits(const TestSuite& suite, Axis axis,
                                           std::uint64_t master_seed) {
  if (axis == Axis::None) throw Error("holdout splits require an axis");
  const auto keys = suite.keys(axis);
  if (keys.size() < 2) {
    throw Error("split " + std::string(scheme_name(axis)) + ": axis has " +
                std::to_string(keys.size()) + " distinct keys, need at least 2");
  }
  std::vector<SplitPlan> plans;
  plans.reserve(keys.size());
  for (const auto& k : keys) plans.push_back(make_holdout_split(suite, axis, k, master_seed));
  return plans;
}

std::vector<std::string> check_plan(const SplitPlan& plan, const TestSuite& suite) {
  std::vector<std::string> problems;
  std::unordered_map<std::string, int> seen;
  auto visit = [&](const std::vector<std::string>& ids, const char* part) {
    for (const auto& id : ids) {
      if (!suite.find(id)) problems.push_back(std::string(part) + " contains unknown case " + id);
      if (++seen[id] > 1) problems.push_back("case " + id + " appears in more than one part");
    }
  };
  visit(plan.train, "train");
  visit(plan.validation, "validation");
  visit(plan.test, "test");
  for (const auto& c : suite.cases()) {
    if (!seen.contains(c.case_id)) problems.push_back("case " + c.case_id + " is not assigned");
  }
  if (plan.axis != Axis::None) {
    if (!plan.key) problems.push_back("held-out plan without a key");
    for (const auto& id : plan.train) {
      const auto* c = suite.find(id);
      if (c && plan.is_heldout(*c, suite)) {
        problems.push_back("held-out case " + id + " is in train");
      }
    }
  }
  return problems;
}

}  // namespace behave
