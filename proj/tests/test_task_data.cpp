#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "behave/csv.hpp"
#include "behave/synth.hpp"
#include "behave/task_data.hpp"
#include "helpers.hpp"

using namespace behave;

namespace {

TaskDataset numbered(std::size_t n, std::size_t hateful = 0) {
  std::vector<TaskExample> ex;
  for (std::size_t i = 0; i < n; ++i) {
    ex.push_back({"e" + std::to_string(i), "text " + std::to_string(i),
                  i < hateful ? Label::Hateful : Label::NonHateful});
  }
  return make_task_dataset("toy", std::move(ex));
}

void check_partition(const TaskSplits& s, std::size_t n) {
  std::set<std::size_t> all;
  for (const auto* part : {&s.train, &s.validation, &s.test}) {
    for (auto i : *part) CHECK(all.insert(i).second);
  }
  CHECK(all.size() == n);
  if (!all.empty()) CHECK(*all.rbegin() == n - 1);
}

}  // namespace

TEST_SUITE("task_data") {
  TEST_CASE("floor-then-remainder sizes") {
    const auto s10 = split_task(numbered(10), {0.8, 0.1, 0.1}, 7);
    CHECK(s10.train.size() == 8);
    CHECK(s10.validation.size() == 1);
    CHECK(s10.test.size() == 1);
    const auto big = split_task(numbered(24783), {0.8, 0.1, 0.1}, 1);
    CHECK(big.train.size() == 19826);
    CHECK(big.validation.size() == 2478);
    CHECK(big.test.size() == 2479);
    check_partition(big, 24783);
  }

  TEST_CASE("partition and determinism for many sizes and seeds") {
    for (std::size_t n : {1u, 2u, 3u, 9u, 11u, 97u, 1000u}) {
      for (std::uint64_t seed : {0u, 1u, 42u}) {
        const auto a = split_task(numbered(n, n / 3), {0.8, 0.1, 0.1}, seed);
        const auto b = split_task(numbered(n, n / 3), {0.8, 0.1, 0.1}, seed);
        check_partition(a, n);
        CHECK(a.train == b.train);
        CHECK(a.test == b.test);
        const double train = static_cast<double>(a.train.size());
        CHECK(train <= 0.8 * static_cast<double>(n));
        CHECK(train > 0.8 * static_cast<double>(n) - 1.0);
        const auto st = split_task(numbered(n, n / 3), {0.8, 0.1, 0.1}, seed, true);
        check_partition(st, n);
      }
    }
    const auto x = split_task(numbered(100), {0.8, 0.1, 0.1}, 1);
    const auto y = split_task(numbered(100), {0.8, 0.1, 0.1}, 2);
    CHECK(x.train != y.train);
  }

  TEST_CASE("stratified split keeps label proportions per part") {
    const auto ds = numbered(1000, 100);
    const auto s = split_task(ds, {0.8, 0.1, 0.1}, 3, true);
    auto hateful = [&](const std::vector<std::size_t>& pos) {
      std::size_t h = 0;
      for (auto i : pos) h += ds.examples[i].label == Label::Hateful;
      return h;
    };
    CHECK(hateful(s.train) == 80);
    CHECK(hateful(s.validation) == 10);
    CHECK(hateful(s.test) == 10);
  }

  TEST_CASE("bad ratios and empty data") {
    CHECK_THROWS_AS(split_task(numbered(10), {0.5, 0.1, 0.1}, 0), ConfigError);
    CHECK_THROWS_AS(split_task(numbered(10), {1.2, -0.1, -0.1}, 0), ConfigError);
    CHECK_THROWS_AS(split_task(numbered(0), {0.8, 0.1, 0.1}, 0), Error);
  }

  TEST_CASE("collapse rule") {
    const auto rule = CollapseRule::from_json(
        nlohmann::json{{"hateful", "hateful"}, {"offensive", "non-hateful"}, {"neither", "non-hateful"}});
    CHECK(rule.apply(" Hateful ") == Label::Hateful);
    CHECK(rule.apply("neither") == Label::NonHateful);
    CHECK_THROWS_WITH_AS(rule.apply("spam"), doctest::Contains("spam"), Error);
    CHECK_THROWS_AS(CollapseRule::from_json(nlohmann::json{{"x", "maybe"}}), ConfigError);
    CHECK(CollapseRule::binary().apply("1") == Label::Hateful);
  }

  TEST_CASE("Davidson-style file with collapse rule") {
    const auto dir = test::scratch_dir("task-davidson");
    const TaskCorpusSpec spec{"Davidson", TaskStyle::Davidson, 24783, 0.058};
    write_task_csv(spec, synth_task_corpus(spec, 1), dir / "d.csv");
    const auto ds = load_task_dataset(dir / "d.csv", collapse_rule_for(spec.style), task_schema_for(spec.style));
    CHECK(ds.size() == 24783);
    CHECK(ds.class_counts[0] + ds.class_counts[1] == 24783);
    CHECK(ds.class_counts[class_index(Label::Hateful)] > 0);
  }

  TEST_CASE("load errors name the line") {
    const auto dir = test::scratch_dir("task-errors");
    {
      std::ofstream f(dir / "bad.csv");
      f << "id,text,label\n1,hello,1\n2,world,7\n";
    }
    CHECK_THROWS_WITH_AS(load_task_dataset(dir / "bad.csv", CollapseRule::binary()), doctest::Contains("line 3"),
                         Error);
    {
      std::ofstream f(dir / "dup.csv");
      f << "id,text,label\n1,hello,1\n1,world,0\n";
    }
    CHECK_THROWS_WITH_AS(load_task_dataset(dir / "dup.csv", CollapseRule::binary()),
                         doctest::Contains("duplicate"), Error);
    {
      std::ofstream f(dir / "noid.csv");
      f << "text,label\n\"a, quoted\ntext\",1\nplain,0\n";
    }
    const auto ds = load_task_dataset(dir / "noid.csv", CollapseRule::binary());
    REQUIRE(ds.size() == 2);
    CHECK(ds.examples[0].text == "a, quoted\ntext");
    CHECK(ds.examples[0].example_id != ds.examples[1].example_id);
  }

  TEST_CASE("three-file mode") {
    const auto tr = numbered(5, 2);
    auto va = make_task_dataset("v", {{"v1", "x", Label::Hateful}, {"v2", "y", Label::NonHateful}});
    auto te = make_task_dataset("t", {{"t1", "z", Label::NonHateful}});
    const auto [joined, splits] = join_presplit("joined", tr, va, te);
    CHECK(joined.size() == 8);
    CHECK(splits.train.size() == 5);
    CHECK(splits.validation == std::vector<std::size_t>{5, 6});
    CHECK(splits.test == std::vector<std::size_t>{7});
    auto clash = make_task_dataset("t", {{"e0", "z", Label::NonHateful}});
    CHECK_THROWS_AS(join_presplit("bad", tr, va, clash), Error);
  }

  TEST_CASE("csv quoting round-trip") {
    std::ostringstream out;
    csv::write_row(out, {"plain", "with,comma", "with \"quote\"", "multi\nline"});
    std::istringstream in("h1,h2,h3,h4\n" + out.str());
    const auto t = csv::read(in);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0] == csv::Row{"plain", "with,comma", "with \"quote\"", "multi\nline"});
    std::istringstream bad("a,b\n\"open,1\n");
    CHECK_THROWS_AS(csv::read(bad), Error);
  }
}
