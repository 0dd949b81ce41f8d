#include <doctest.h>

#include <algorithm>
#include <set>

#include "behave/splitter.hpp"
#include "behave/synth.hpp"
#include "helpers.hpp"

using namespace behave;

namespace {

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

std::set<std::string> heldout_ids(const SplitPlan& p, const TestSuite& s) {
  std::set<std::string> out;
  for (const auto& c : s.cases()) {
    if (p.is_heldout(c, s)) out.insert(c.case_id);
  }
  return out;
}

}  // namespace

TEST_SUITE("splitter") {
  TEST_CASE("All split sizes") {
    const auto official = synth_hatecheck(1);
    const auto all = make_all_split(official, 0);
    CHECK(all.train.size() == 1864);
    CHECK(all.validation.size() == 932);
    CHECK(all.test.size() == 932);
    CHECK(check_plan(all, official).empty());

    std::vector<TestCase> four(official.cases().begin(), official.cases().begin() + 4);
    const auto small = make_all_split(TestSuite(four, official.taxonomy()), 0);
    CHECK(small.train.size() == 2);
    CHECK(small.validation.size() == 1);
    CHECK(small.test.size() == 1);
  }

  TEST_CASE("same seed gives identical membership, other seed differs") {
    const auto suite = synth_hatecheck(1);
    CHECK(make_all_split(suite, 9) == make_all_split(suite, 9));
    CHECK(make_all_split(suite, 9).train != make_all_split(suite, 10).train);
  }

  TEST_CASE("official suite plan counts") {
    const auto suite = synth_hatecheck(1);
    CHECK(make_holdout_splits(suite, Axis::Functionality, 0).size() == 29);
    CHECK(make_holdout_splits(suite, Axis::Identity, 0).size() == 7);
    CHECK(make_holdout_splits(suite, Axis::Class, 0).size() == 11);
  }

  TEST_CASE("toy suite holding out B") {
    const auto suite = test::toy_suite();
    const auto plan = make_holdout_split(suite, Axis::Functionality, "B", 4);
    CHECK(plan.name() == "FuncOut/B");
    CHECK(plan.train.size() == 2);
    for (const auto& id : plan.train) CHECK(id[0] == 'a');
    CHECK(plan.validation.size() == 3);
    CHECK(plan.test.size() == 3);
    std::set<std::string> pool = as_set(plan.validation);
    for (const auto& id : plan.test) pool.insert(id);
    CHECK(std::count_if(pool.begin(), pool.end(), [](const std::string& s) { return s[0] == 'b'; }) == 4);
    CHECK(check_plan(plan, suite).empty());
  }

  TEST_CASE("identity scope: cases without identity are never held out") {
    const auto suite = test::toy_suite();
    for (const auto& plan : make_holdout_splits(suite, Axis::Identity, 1)) {
      for (const auto& c : suite.cases()) {
        if (!c.identity) CHECK_FALSE(plan.is_heldout(c, suite));
      }
      CHECK(check_plan(plan, suite).empty());
    }
  }

  TEST_CASE("class subsumption on the official suite") {
    const auto suite = synth_hatecheck(1);
    const auto funcs = make_holdout_splits(suite, Axis::Functionality, 0);
    for (const auto& cp : make_holdout_splits(suite, Axis::Class, 0)) {
      std::set<std::string> expected;
      for (const auto& fp : funcs) {
        if (suite.taxonomy().at(*fp.key).class_id == *cp.key) {
          const auto h = heldout_ids(fp, suite);
          expected.insert(h.begin(), h.end());
        }
      }
      CHECK(heldout_ids(cp, suite) == expected);
    }
  }

  TEST_CASE("per-plan seeding is independent of other keys") {
    const auto suite = synth_hatecheck(1);
    std::vector<TestCase> fewer;
    for (const auto& c : suite.cases()) {
      if (c.functionality != "F29") fewer.push_back(c);
    }
    const TestSuite reduced(fewer, suite.taxonomy());
    const auto a = make_holdout_split(suite, Axis::Functionality, "F1", 5);
    const auto b = make_holdout_split(reduced, Axis::Functionality, "F1", 5);
    CHECK(a.seed == b.seed);
  }

  TEST_CASE("errors: single key and empty remainder") {
    const auto suite = test::toy_suite();
    std::vector<TestCase> only_a;
    for (const auto& c : suite.cases()) {
      if (c.functionality == "A") only_a.push_back(c);
    }
    const TestSuite single(only_a, suite.taxonomy());
    CHECK_THROWS_WITH_AS(make_holdout_splits(single, Axis::Functionality, 0), doctest::Contains("at least 2"), Error);
    CHECK_THROWS_WITH_AS(make_holdout_split(single, Axis::Functionality, "A", 0), doctest::Contains("no cases remain"),
                         Error);
  }

  TEST_CASE("check_plan detects violations") {
    const auto suite = test::toy_suite();
    auto plan = make_holdout_split(suite, Axis::Functionality, "B", 0);
    CHECK(check_plan(plan, suite).empty());
    auto leaky = plan;
    leaky.train.push_back(leaky.test.back());
    leaky.test.pop_back();
    bool leak_found = false;
    for (const auto& id : leaky.train) leak_found |= id[0] == 'b';
    if (leak_found) CHECK_FALSE(check_plan(leaky, suite).empty());
    auto dup = plan;
    dup.test.push_back(dup.train.front());
    CHECK_FALSE(check_plan(dup, suite).empty());
    auto missing = plan;
    missing.validation.pop_back();
    CHECK_FALSE(check_plan(missing, suite).empty());
  }

  TEST_CASE("plan JSON round-trip") {
    const auto suite = test::toy_suite();
    for (const auto& p : make_holdout_splits(suite, Axis::Class, 3)) {
      CHECK(SplitPlan::from_json(p.to_json()) == p);
    }
    const auto all = make_all_split(suite, 3);
    CHECK(SplitPlan::from_json(nlohmann::json::parse(all.to_json().dump())) == all);
  }

  TEST_CASE("random suites: partition and purity for all schemes") {
    Rng rng(2024);
    for (int t = 0; t < 30; ++t) {
      const auto suite = random_suite(rng);
      CHECK(check_plan(make_all_split(suite, t), suite).empty());
      for (Axis axis : {Axis::Functionality, Axis::Identity, Axis::Class}) {
        if (suite.keys(axis).size() < 2) continue;
        for (const auto& k : suite.keys(axis)) {
          try {
            CHECK(check_plan(make_holdout_split(suite, axis, k, t), suite).empty());
          } catch (const Error&) {
          }
        }
      }
    }
  }
}
