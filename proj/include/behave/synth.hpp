#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "behave/rng.hpp"
#include "behave/suite.hpp"
#include "behave/task_data.hpp"

namespace behave {

/// Expands "{a|b|c}" alternations into every combination, in lexicographic
/// order of the choices. Nested braces are not supported.
std::vector<std::string> expand_alternatives(std::string_view pattern);

/// Template-generated stand-in for the HateCheck suite: same taxonomy, same
/// per-functionality counts (3,728 cases), synthetic wording.
TestSuite synth_hatecheck(std::uint64_t seed);

/// Writes a suite in the HateCheck CSV layout (functionality written as its alias).
void write_hatecheck_csv(const TestSuite& suite, const std::filesystem::path& path);

enum class TaskStyle : std::uint8_t {
  /// Columns id,tweet,class with 0 = hate speech, 1 = offensive, 2 = neither.
  Davidson,
  /// Columns id,tweet,label with hateful / abusive / spam / normal.
  Founta,
};

struct TaskCorpusSpec {
  std::string name;
  TaskStyle style = TaskStyle::Davidson;
  std::size_t size = 0;
  double hateful_rate = 0.058;
};

/// Raw labelled rows (id, text, raw label) in the style's vocabulary.
struct RawTaskRow {
  std::string id;
  std::string text;
  std::string label;
};

std::vector<RawTaskRow> synth_task_corpus(const TaskCorpusSpec& spec, std::uint64_t seed);
void write_task_csv(const TaskCorpusSpec& spec, const std::vector<RawTaskRow>& rows,
                    const std::filesystem::path& path);
/// Schema and collapse rule matching write_task_csv for a style.
TaskSchema task_schema_for(TaskStyle style);
CollapseRule collapse_rule_for(TaskStyle style);

/// Bounds for random property-test suites.
struct RandomSuiteSpec {
  std::size_t min_functionalities = 2;
  std::size_t max_functionalities = 12;
  std::size_t min_classes = 1;
  std::size_t max_classes = 4;
  std::size_t max_identities = 5;
  std::size_t max_cases = 500;
};

/// A random taxonomy and suite within the bounds. Every functionality and
/// class gets at least one case; cases carry an identity with probability 1/2
/// when identities exist.
TestSuite random_suite(Rng& rng, const RandomSuiteSpec& spec = {});

}  // namespace behave
