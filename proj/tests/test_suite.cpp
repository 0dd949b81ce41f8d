#include <doctest.h>

#include <fstream>
#include <numeric>

#include "behave/suite.hpp"
#include "behave/synth.hpp"
#include "helpers.hpp"

using namespace behave;

namespace {

std::string f1_rows(std::size_t n) {
  std::string s = "case_id,functionality,test_case,label_gold,target_ident,templ_id\n";
  for (std::size_t i = 0; i < n; ++i) {
    s += std::to_string(i + 1) + ",derog_neg_emote_h,I hate group " + std::to_string(i) +
         ",hateful,women,1\n";
  }
  return s;
}

}  // namespace

TEST_SUITE("suite_model") {
  TEST_CASE("built-in taxonomy has 29 functionalities, 11 classes, 7 identities") {
    const auto tax = Taxonomy::hatecheck();
    CHECK(tax.functionalities().size() == 29);
    CHECK(tax.classes().size() == 11);
    CHECK(tax.identities().size() == 7);
    std::size_t total = 0;
    for (const auto& f : tax.functionalities()) total += f.expected_count;
    CHECK(total == 3728);
    CHECK(tax.at("F1").expected_count == 140);
    CHECK(tax.at("F8").expected_count == 30);
    CHECK(tax.find("derog_neg_emote_h")->id == "F1");
    CHECK(tax.find("DEROG_NEG_EMOTE_H")->id == "F1");
  }

  TEST_CASE("shipped taxonomy file equals the built-in taxonomy") {
    CHECK(Taxonomy::load(test::source_dir() / "data" / "hatecheck_taxonomy.json") == Taxonomy::hatecheck());
    CHECK(Taxonomy::from_json(Taxonomy::hatecheck().to_json()) == Taxonomy::hatecheck());
  }

  TEST_CASE("synthetic official suite loads with 3,728 cases and matching counts") {
    const auto dir = test::scratch_dir("suite-official");
    const auto suite = synth_hatecheck(3);
    write_hatecheck_csv(suite, dir / "hc.csv");
    const auto loaded = load_suite(dir / "hc.csv");
    CHECK(loaded.size() == 3728);
    CHECK(loaded.keys(Axis::Functionality).size() == 29);
    CHECK(loaded.keys(Axis::Class).size() == 11);
    CHECK(loaded.keys(Axis::Identity).size() == 7);
    const auto report = validate_suite(loaded);
    CHECK(report.count_mismatches() == 0);
    CHECK(report.label_violations.empty());
    CHECK(report.total_cases == 3728);
    CHECK(loaded == suite);
  }

  TEST_CASE("file with only F1 rows") {
    const auto suite = parse_suite(f1_rows(140), {}, Taxonomy::hatecheck());
    CHECK(suite.index(Axis::Functionality).at("F1").size() == 140);
    const auto report = validate_suite(suite);
    CHECK(report.count_mismatches() == 28);
  }

  TEST_CASE("empty data file is an error") {
    CHECK_THROWS_WITH_AS(parse_suite(f1_rows(0), {}, Taxonomy::hatecheck()),
                         doctest::Contains("no cases"), Error);
  }

  TEST_CASE("load errors") {
    const auto tax = Taxonomy::hatecheck();
    CHECK_THROWS_WITH_AS(parse_suite("case_id,test_case,label_gold,target_ident\n1,x,hateful,\n", {}, tax),
                         doctest::Contains("functionality"), Error);
    CHECK_THROWS_WITH_AS(
        parse_suite("case_id,functionality,test_case,label_gold,target_ident\n1,F1,x,hateful,\n1,F1,y,hateful,\n",
                    {}, tax),
        doctest::Contains("duplicate case_id"), Error);
    CHECK_THROWS_WITH_AS(
        parse_suite("case_id,functionality,test_case,label_gold,target_ident\n1,F99,x,hateful,\n", {}, tax),
        doctest::Contains("unknown functionality"), Error);
    CHECK_THROWS_WITH_AS(
        parse_suite("case_id,functionality,test_case,label_gold,target_ident\n1,F1,x,maybe,\n", {}, tax),
        doctest::Contains("line 2"), Error);
  }

  TEST_CASE("null identity tokens, normalization and extra columns") {
    const auto suite = parse_suite(
        "case_id,functionality,test_case,label_gold,target_ident,note\n"
        "1,F1,x,hateful,  Women ,keep\n2,F1,y,hateful,nan,\n3,F22,z,non-hateful,,\n",
        {}, Taxonomy::hatecheck());
    CHECK(suite.cases()[0].identity == std::optional<std::string>("women"));
    CHECK_FALSE(suite.cases()[1].identity.has_value());
    CHECK_FALSE(suite.cases()[2].identity.has_value());
    REQUIRE(suite.cases()[0].extra.size() == 1);
    CHECK(suite.cases()[0].extra[0] == std::pair<std::string, std::string>{"note", "keep"});
    CHECK(suite.index(Axis::Identity).at("women").size() == 1);
  }

  TEST_CASE("schema as key=value and JSON, custom delimiter") {
    const auto s1 = SuiteSchema::parse("case_id=id\ntext=sentence\nlabel=gold\nfunctionality=func\nidentity=grp\ndelimiter=;\n");
    CHECK(s1.case_id == "id");
    CHECK(s1.delimiter == ';');
    const auto s2 = SuiteSchema::parse(R"({"case_id":"id","text":"sentence","delimiter":"\t"})");
    CHECK(s2.text == "sentence");
    CHECK(s2.delimiter == '\t');
    const auto suite = parse_suite("id;func;sentence;gold;grp\nx1;F1;hello;hateful;women\n", s1, Taxonomy::hatecheck());
    CHECK(suite.size() == 1);
    CHECK_THROWS_AS(SuiteSchema::parse("bogus=1"), ConfigError);
  }

  TEST_CASE("validation warnings: relabelled case and missing functionality") {
    auto base = synth_hatecheck(1);
    std::vector<TestCase> cases = base.cases();
    for (auto& c : cases) {
      if (c.functionality == "F1") {
        c.gold = Label::NonHateful;
        break;
      }
    }
    const auto relabelled = validate_suite(TestSuite(cases, base.taxonomy()));
    CHECK(relabelled.label_violations.size() == 1);
    CHECK(relabelled.count_mismatches() == 0);

    std::vector<TestCase> without_f8;
    for (const auto& c : base.cases()) {
      if (c.functionality != "F8") without_f8.push_back(c);
    }
    const auto missing = validate_suite(TestSuite(without_f8, base.taxonomy()));
    CHECK(missing.count_mismatches() == 1);
    bool found = false;
    for (const auto& cc : missing.counts) {
      if (cc.functionality == "F8") {
        found = true;
        CHECK(cc.expected == 30);
        CHECK(cc.actual == 0);
      }
    }
    CHECK(found);
  }

  TEST_CASE("round-trip through CSV and canonical JSON") {
    const auto dir = test::scratch_dir("suite-roundtrip");
    const auto suite = synth_hatecheck(5);
    write_suite_csv(suite, dir / "s.csv");
    const auto again = load_suite(dir / "s.csv");
    CHECK(again == suite);
    {
      std::ofstream f(dir / "s.json");
      f << suite_to_json(suite).dump();
    }
    const auto from_json = load_suite(dir / "s.json");
    CHECK(from_json == suite);
    CHECK(from_json.indexes_consistent());
  }

  TEST_CASE("index consistency and count sums") {
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
      const auto suite = random_suite(rng);
      CHECK(suite.indexes_consistent());
      std::size_t by_func = 0, by_class = 0;
      for (const auto& [k, v] : suite.index(Axis::Functionality)) {
        by_func += v.size();
        for (auto i : v) CHECK(suite.cases()[i].functionality == k);
      }
      for (const auto& [k, v] : suite.index(Axis::Class)) by_class += v.size();
      CHECK(by_func == suite.size());
      CHECK(by_class == suite.size());
    }
  }

  TEST_CASE("identity keys follow taxonomy order") {
    const auto suite = test::toy_suite();
    CHECK(suite.keys(Axis::Identity) == std::vector<std::string>{"g1", "g2"});
    CHECK(suite.key_of(suite.cases()[1], Axis::Identity) == std::nullopt);
    CHECK(suite.key_of(suite.cases()[0], Axis::Class) == std::optional<std::string>("c1"));
  }
}
