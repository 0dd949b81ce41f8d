#include <doctest.h>

#include "behave/analysis.hpp"
#include "behave/rng.hpp"

using namespace behave;

TEST_SUITE("analysis") {
  TEST_CASE("delta p on gold-label probabilities") {
    PredictionSet before, after;
    before.add("s1", 0.9785);
    after.add("s1", 0.0019);
    before.add("s2", 0.3);
    after.add("s2", 0.3);
    const GoldLabels gold{{"s1", Label::Hateful}, {"s2", Label::NonHateful}};
    const auto recs = delta_p(before, after, gold);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].delta == 0.0019 - 0.9785);
    CHECK(recs[0].delta == doctest::Approx(-0.9766));
    CHECK(recs[1].p_before == 1.0 - 0.3);
    CHECK(recs[1].delta == 0.0);
  }

  TEST_CASE("identical before and after give zero deltas") {
    PredictionSet p;
    GoldLabels gold;
    for (int i = 0; i < 10; ++i) {
      p.add(std::to_string(i), i / 10.0);
      gold.emplace_back(std::to_string(i), i % 2 ? Label::Hateful : Label::NonHateful);
    }
    for (const auto& r : delta_p(p, p, gold)) CHECK(r.delta == 0.0);
  }

  TEST_CASE("coverage errors list the ids") {
    PredictionSet before, after;
    before.add("a", 0.5);
    after.add("b", 0.5);
    const GoldLabels gold{{"a", Label::Hateful}, {"b", Label::Hateful}};
    CHECK_THROWS_WITH_AS(delta_p(before, after, gold), doctest::Contains("b"), Error);
  }

  TEST_CASE("select extremes") {
    const std::vector<DeltaRecord> recs{make_delta_record("a", Label::Hateful, 0.95, 0.05),
                                        make_delta_record("b", Label::Hateful, 0.5, 0.7),
                                        make_delta_record("c", Label::NonHateful, 0.6, 0.5),
                                        make_delta_record("d", Label::NonHateful, 0.1, 0.9)};
    const auto s = select_extremes(recs);
    CHECK(s.id[0] == "a");
    CHECK(s.id[1] == "c");
    CHECK(s.id[2] == "b");
    CHECK(s.id[3] == "d");
    CHECK(to_string(ExtremeCategory::DeteriorationHateful) == "largest_deterioration_hateful");
  }

  TEST_CASE("ties go to the first occurrence") {
    const std::vector<DeltaRecord> recs{make_delta_record("n1", Label::NonHateful, 0.5, 0.6),
                                        make_delta_record("h1", Label::Hateful, 0.5, 0.6),
                                        make_delta_record("h2", Label::Hateful, 0.5, 0.6),
                                        make_delta_record("n2", Label::NonHateful, 0.5, 0.6)};
    const auto s = select_extremes(recs);
    CHECK(s.id[0] == "h1");
    CHECK(s.id[2] == "h1");
    CHECK(s.id[1] == "n1");
    CHECK(s.id[3] == "n1");
  }

  TEST_CASE("empty label set is an error") {
    const std::vector<DeltaRecord> recs{make_delta_record("a", Label::Hateful, 0.5, 0.6)};
    CHECK_THROWS_AS(select_extremes(recs), Error);
    CHECK_THROWS_AS(make_delta_record("x", Label::Hateful, 1.5, 0.2), Error);
  }

  TEST_CASE("selection is invariant under shuffling without ties") {
    std::vector<DeltaRecord> recs;
    for (int i = 0; i < 20; ++i) {
      recs.push_back(make_delta_record("r" + std::to_string(i), i % 3 ? Label::NonHateful : Label::Hateful,
                                       0.5, (i * 7 % 20) / 20.0));
    }
    const auto s = select_extremes(recs);
    Rng rng(4);
    for (int t = 0; t < 10; ++t) {
      auto shuffled = recs;
      rng.shuffle(std::span<DeltaRecord>(shuffled));
      const auto s2 = select_extremes(shuffled);
      CHECK(s2.id == s.id);
    }
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (recs[i].gold == Label::Hateful) CHECK(recs[s.index[0]].delta <= recs[i].delta);
    }
  }

  TEST_CASE("top-k") {
    std::vector<DeltaRecord> recs;
    for (int i = 0; i < 8; ++i) {
      recs.push_back(make_delta_record("h" + std::to_string(i), Label::Hateful, 0.5, i / 10.0));
    }
    recs.push_back(make_delta_record("n0", Label::NonHateful, 0.5, 0.4));
    const auto top = top_k_extremes(recs, 3);
    CHECK(top[0] == std::vector<std::size_t>{0, 1, 2});
    CHECK(top[2] == std::vector<std::size_t>{7, 6, 5});
    CHECK(top[1] == std::vector<std::size_t>{8});
    CHECK(top[3] == std::vector<std::size_t>{8});
    const auto def = top_k_extremes(recs);
    CHECK(def[0].size() == 5);
  }
}
