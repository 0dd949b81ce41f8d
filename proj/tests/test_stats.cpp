#include <doctest.h>

#include "behave/stats.hpp"
#include "oracles.hpp"

using namespace behave;

namespace {

struct Triple {
  std::vector<Label> a, b, gold;
};

// b examples where only A is right, c where only B is right, plus `agree` concordant ones.
Triple discordant(int b, int c, int agree = 3) {
  Triple t;
  for (int i = 0; i < b; ++i) {
    t.gold.push_back(Label::Hateful);
    t.a.push_back(Label::Hateful);
    t.b.push_back(Label::NonHateful);
  }
  for (int i = 0; i < c; ++i) {
    t.gold.push_back(Label::NonHateful);
    t.a.push_back(Label::Hateful);
    t.b.push_back(Label::NonHateful);
  }
  for (int i = 0; i < agree; ++i) {
    t.gold.push_back(i % 2 ? Label::Hateful : Label::NonHateful);
    t.a.push_back(t.gold.back());
    t.b.push_back(t.gold.back());
  }
  return t;
}

Triple random_null(Rng& rng, std::size_t n) {
  Triple t;
  for (std::size_t i = 0; i < n; ++i) {
    t.gold.push_back(rng.coin() ? Label::Hateful : Label::NonHateful);
    t.a.push_back(rng.coin() ? Label::Hateful : Label::NonHateful);
    t.b.push_back(rng.coin() ? Label::Hateful : Label::NonHateful);
  }
  return t;
}

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("paired binomial examples") {
    auto t = discordant(0, 0);
    CHECK(binomial_paired_test(t.a, t.b, t.gold).p_value == 1.0);
    t = discordant(5, 0);
    const auto r = binomial_paired_test(t.a, t.b, t.gold);
    CHECK(r.b == 5);
    CHECK(r.c == 0);
    CHECK(r.p_value == 0.0625);
    for (int n : {1, 4, 9, 30}) {
      t = discordant(n, n);
      CHECK(binomial_paired_test(t.a, t.b, t.gold).p_value == 1.0);
    }
  }

  TEST_CASE("binomial matches enumeration for b + c <= 12") {
    for (int n = 0; n <= 12; ++n) {
      for (int b = 0; b <= n; ++b) {
        CHECK(binomial_two_sided(b, n, 0.5) == oracle::binomial_enumerated(b, n - b));
        CHECK(binomial_two_sided(b, n, 0.5, TwoSidedRule::MinLikelihood) ==
              oracle::binomial_enumerated_min_likelihood(b, n - b));
        const auto t = discordant(b, n - b);
        const auto ab = binomial_paired_test(t.a, t.b, t.gold);
        const auto ba = binomial_paired_test(t.b, t.a, t.gold);
        CHECK(ab.p_value == ba.p_value);
      }
    }
  }

  TEST_CASE("binomial for large n and other rates") {
    const double p = binomial_two_sided(40, 100, 0.5);
    CHECK(p == doctest::Approx(0.056887).epsilon(1e-4));
    const auto [lo, hi] = binomial_tails(3, 10, 0.3);
    CHECK(lo == doctest::Approx(0.6496107).epsilon(1e-6));
    CHECK(hi == doctest::Approx(0.6172172).epsilon(1e-6));
    CHECK(binomial_two_sided(0, 0, 0.3) == 1.0);
    const auto one = binomial_one_sample_test(90, 100, 0.8);
    CHECK(one.method == TestMethod::ExactBinomialOneSample);
    CHECK(one.p_value < 0.05);
    CHECK(binomial_paired_test(discordant(300, 200).a, discordant(300, 200).b, discordant(300, 200).gold).p_value <
          0.001);
  }

  TEST_CASE("randomization examples") {
    Rng rng(3);
    const auto t = random_null(rng, 40);
    const auto same = randomization_test_macro_f1(t.a, t.a, t.gold, 1000, 1);
    CHECK(same.p_value == 1.0);
    CHECK(same.observed == 0.0);

    std::vector<Label> gold, perfect, wrong;
    for (int i = 0; i < 20; ++i) {
      gold.push_back(i % 2 ? Label::Hateful : Label::NonHateful);
      perfect.push_back(gold.back());
      wrong.push_back(i % 2 ? Label::NonHateful : Label::Hateful);
    }
    const auto extreme = randomization_test_macro_f1(perfect, wrong, gold, 10000, 7);
    CHECK(extreme.p_value <= 0.001);
    CHECK(extreme.p_value >= 1.0 / 10001.0);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto r = randomization_test_macro_f1(t.a, t.b, t.gold, 1, seed);
      CHECK((r.p_value == 0.5 || r.p_value == 1.0));
    }
    CHECK_THROWS_AS(randomization_test_macro_f1(t.a, t.b, t.gold, 0, 1), ConfigError);
  }

  TEST_CASE("randomization is deterministic, symmetric and thread independent") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
      const auto t = random_null(rng, 60);
      const std::int64_t iters = 3000;
      const auto serial = randomization_exceed_count_serial(t.a, t.b, t.gold, iters, trial);
      const auto parallel = randomization_exceed_count_parallel(t.a, t.b, t.gold, iters, trial);
      CHECK(serial == parallel);
      const auto r1 = randomization_test_macro_f1(t.a, t.b, t.gold, iters, trial);
      const auto r2 = randomization_test_macro_f1(t.a, t.b, t.gold, iters, trial);
      CHECK(r1.p_value == r2.p_value);
      CHECK(r1.p_value == static_cast<double>(serial + 1) / static_cast<double>(iters + 1));
      const auto swapped = randomization_test_macro_f1(t.b, t.a, t.gold, iters, trial);
      CHECK(swapped.p_value == r1.p_value);
    }
  }

  TEST_CASE("randomization null calibration") {
    Rng rng(2718);
    int rejections = 0;
    const int trials = 300;
    for (int i = 0; i < trials; ++i) {
      const auto t = random_null(rng, 50);
      rejections += decide(randomization_test_macro_f1(t.a, t.b, t.gold, 500, static_cast<std::uint64_t>(i)));
    }
    const double rate = static_cast<double>(rejections) / trials;
    CHECK(rate > 0.01);
    CHECK(rate < 0.10);
  }

  TEST_CASE("decide") {
    SignificanceResult r;
    r.p_value = 0.05;
    CHECK(decide(r, 0.05));
    r.p_value = 0.774;
    CHECK_FALSE(decide(r));
    r.p_value = 0.0009;
    CHECK(decide(r));
    CHECK_THROWS_AS(decide(r, 0.0), ConfigError);
    CHECK_THROWS_AS(decide(r, 1.0), ConfigError);
  }

  TEST_CASE("prediction-set overloads check coverage") {
    PredictionSet a, b;
    a.add("1", 0.9);
    a.add("2", 0.1);
    b.add("1", 0.2);
    const GoldLabels gold{{"1", Label::Hateful}, {"2", Label::NonHateful}};
    CHECK_THROWS_WITH_AS(binomial_paired_test(a, b, gold), doctest::Contains("2"), Error);
    b.add("2", 0.3);
    const auto r = binomial_paired_test(a, b, gold);
    CHECK(r.b == 1);
    CHECK(r.c == 0);
    CHECK(r.sample_size == 2);
    const auto j = r.to_json();
    CHECK(j.at("method") == "exact-binomial-paired");
  }
}
