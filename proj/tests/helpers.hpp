#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "behave/rng.hpp"
#include "behave/suite.hpp"

namespace behave::test {

inline std::filesystem::path source_dir() { return BEHAVE_SOURCE_DIR; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("behave-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Taxonomy toy_taxonomy() {
  return Taxonomy({{"A", "c1", Label::Hateful, 4, "a", {"func_a"}},
                   {"B", "c2", Label::NonHateful, 4, "b", {"func_b"}}},
                  {"c1", "c2"}, {"g1", "g2"});
}

/// Eight cases: A (ids a1..a4, hateful) and B (ids b1..b4, non-hateful).
inline TestSuite toy_suite() {
  std::vector<TestCase> cases;
  for (int i = 1; i <= 4; ++i) {
    TestCase c;
    c.case_id = "a" + std::to_string(i);
    c.text = "alpha text " + std::to_string(i);
    c.gold = Label::Hateful;
    c.functionality = "A";
    c.identity = i % 2 ? std::optional<std::string>("g1") : std::nullopt;
    cases.push_back(c);
  }
  for (int i = 1; i <= 4; ++i) {
    TestCase c;
    c.case_id = "b" + std::to_string(i);
    c.text = "beta text " + std::to_string(i);
    c.gold = Label::NonHateful;
    c.functionality = "B";
    c.identity = "g2";
    cases.push_back(c);
  }
  return TestSuite(std::move(cases), toy_taxonomy());
}

}  // namespace behave::test
