#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "behave/common.hpp"

namespace behave {

struct FunctionalitySpec {
  std::string id;        // canonical identifier, e.g. "F14"
  std::string class_id;  // e.g. "negation"
  Label expected_label = Label::Hateful;
  std::size_t expected_count = 0;
  std::string description;
  /// Alternative spellings accepted on input (distribution-specific names).
  std::vector<std::string> aliases;
};

/// Functionality -> class mapping plus the identity-group vocabulary.
class Taxonomy {
 public:
  Taxonomy() = default;
  Taxonomy(std::vector<FunctionalitySpec> functionalities, std::vector<std::string> classes,
           std::vector<std::string> identities);

  /// The 29-functionality / 11-class / 7-identity HateCheck taxonomy.
  static Taxonomy hatecheck();

  static Taxonomy from_json(const nlohmann::json& j);
  static Taxonomy load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::vector<FunctionalitySpec>& functionalities() const { return functionalities_; }
  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<std::string>& identities() const { return identities_; }

  /// Looks up a functionality by canonical id or alias (alias match is case-insensitive).
  const FunctionalitySpec* find(std::string_view id_or_alias) const;
  const FunctionalitySpec& at(std::string_view id) const;

  friend bool operator==(const Taxonomy&, const Taxonomy&);

 private:
  std::vector<FunctionalitySpec> functionalities_;
  std::vector<std::string> classes_;
  std::vector<std::string> identities_;
  std::map<std::string, std::size_t, std::less<>> lookup_;
};

bool operator==(const FunctionalitySpec& a, const FunctionalitySpec& b);

struct TestCase {
  std::string case_id;
  std::string text;
  Label gold = Label::NonHateful;
  std::string functionality;
  std::optional<std::string> identity;
  std::optional<std::string> template_id;
  /// Columns not named by the schema, preserved verbatim (column name, value).
  std::vector<std::pair<std::string, std::string>> extra;

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

/// Immutable collection of test cases with functionality/class/identity indexes.
class TestSuite {
 public:
  using Index = std::map<std::string, std::vector<std::size_t>, std::less<>>;

  TestSuite(std::vector<TestCase> cases, Taxonomy taxonomy);

  const std::vector<TestCase>& cases() const { return cases_; }
  const Taxonomy& taxonomy() const { return taxonomy_; }
  std::size_t size() const { return cases_.size(); }

  const TestCase* find(std::string_view case_id) const;
  const std::string& class_of(const TestCase& c) const;

  /// Group key of a case along an axis; empty for Axis::None or absent identity.
  std::optional<std::string> key_of(const TestCase& c, Axis axis) const;

  /// Case positions grouped by key along the axis (Axis::None is not indexed).
  const Index& index(Axis axis) const;
  /// Keys present in the suite, in taxonomy order (unlisted identities follow in
  /// order of first appearance).
  std::vector<std::string> keys(Axis axis) const;

  /// Recomputes the indexes from the cases and compares with the stored ones.
  bool indexes_consistent() const;

  friend bool operator==(const TestSuite& a, const TestSuite& b);

 private:
  void build_indexes(Index& by_func, Index& by_class, Index& by_ident) const;

  std::vector<TestCase> cases_;
  Taxonomy taxonomy_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  Index by_func_;
  Index by_class_;
  Index by_ident_;
};

/// Maps logical fields to column names of a delimited suite file.
struct SuiteSchema {
  std::string case_id = "case_id";
  std::string text = "test_case";
  std::string label = "label_gold";
  std::string functionality = "functionality";
  std::string identity = "target_ident";
  /// Optional; preserved but unused.
  std::string template_id = "templ_id";
  char delimiter = ',';
  /// Identity values (after trim+lowercase) meaning "no target".
  std::vector<std::string> null_tokens{"", "nan", "none", "null", "na", "n/a"};

  /// Parses either a JSON object or `key=value` lines.
  static SuiteSchema parse(std::string_view text);
  static SuiteSchema load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// Reads a delimited suite file (or the canonical JSON form, by `.json` extension).
TestSuite load_suite(const std::filesystem::path& path, const SuiteSchema& schema = {},
                     const Taxonomy& taxonomy = Taxonomy::hatecheck());

/// Parses in-memory delimited text; `source` names the input in error messages.
TestSuite parse_suite(std::string_view data, const SuiteSchema& schema, const Taxonomy& taxonomy,
                      std::string_view source = "<memory>");

nlohmann::json suite_to_json(const TestSuite& suite);
TestSuite suite_from_json(const nlohmann::json& j);
void write_suite_csv(const TestSuite& suite, const std::filesystem::path& path,
                     const SuiteSchema& schema = {});

std::string normalize_identity(std::string_view raw);

struct ValidationReport {
  struct CountCheck {
    std::string functionality;
    std::size_t expected = 0;
    std::size_t actual = 0;
  };
  struct LabelViolation {
    std::string case_id;
    std::string functionality;
    Label expected;
    Label actual;
  };

  std::size_t total_cases = 0;
  std::size_t expected_total = 0;
  std::vector<CountCheck> counts;  // one per taxonomy functionality
  std::vector<LabelViolation> label_violations;
  std::vector<std::pair<std::string, std::size_t>> identity_coverage;
  std::size_t cases_without_identity = 0;
  std::vector<std::string> warnings;

  std::size_t count_mismatches() const;
  bool clean() const { return warnings.empty(); }
  nlohmann::json to_json() const;
};

/// Advisory checks against the taxonomy; never throws.
ValidationReport validate_suite(const TestSuite& suite);

}  // namespace behave
