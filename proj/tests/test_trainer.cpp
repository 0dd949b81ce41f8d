#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "behave/kernels.hpp"
#include "behave/synth.hpp"
#include "behave/trainer.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace behave;

namespace {

FeatureConfig small_features() {
  FeatureConfig fc;
  fc.dimension = 1u << 12;
  return fc;
}

FeatureSet separable_set(const FeatureConfig& fc) {
  const std::vector<std::string> hate{"zork vlam", "zork qint", "vlam qint", "qint zork zork",
                                      "vlam vlam", "zork", "qint", "vlam zork qint",
                                      "qint vlam", "zork qint vlam"};
  const std::vector<std::string> fine{"apple pear", "pear plum", "plum apple", "apple",
                                      "pear", "plum plum", "apple pear plum", "pear apple",
                                      "plum pear", "apple plum"};
  std::vector<std::string> ids, texts;
  std::vector<Label> labels;
  for (std::size_t i = 0; i < hate.size(); ++i) {
    ids.push_back("h" + std::to_string(i));
    texts.push_back(hate[i]);
    labels.push_back(Label::Hateful);
    ids.push_back("n" + std::to_string(i));
    texts.push_back(fine[i]);
    labels.push_back(Label::NonHateful);
  }
  return make_feature_set("separable", fc, ids, texts, labels);
}

double training_accuracy(const TrainedModel& m, const FeatureSet& s) {
  const auto p = predict(m, s);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < s.size(); ++i) ok += hard_label(p.at(s.ids[i])) == s.y[i];
  return static_cast<double>(ok) / static_cast<double>(s.size());
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("class weights") {
    std::vector<Label> balanced(100, Label::NonHateful);
    std::fill(balanced.begin(), balanced.begin() + 50, Label::Hateful);
    auto w = class_weights(balanced);
    CHECK(w[0] == 1.0);
    CHECK(w[1] == 1.0);

    std::vector<Label> skewed(100, Label::NonHateful);
    std::fill(skewed.begin(), skewed.begin() + 5, Label::Hateful);
    w = class_weights(skewed);
    CHECK(w[class_index(Label::Hateful)] == doctest::Approx(10.0));
    CHECK(w[class_index(Label::NonHateful)] == doctest::Approx(100.0 / 190.0));
    double mean = 0.0;
    for (Label l : skewed) mean += w[class_index(l)];
    CHECK(mean / 100.0 == doctest::Approx(1.0));

    w = class_weights(std::vector<Label>{Label::Hateful, Label::NonHateful});
    CHECK(w[0] == 1.0);
    CHECK(w[1] == 1.0);
    CHECK_THROWS_AS(class_weights(std::vector<Label>{Label::Hateful}), Error);
  }

  TEST_CASE("featurize basics") {
    const auto fc = small_features();
    CHECK(featurize("", fc).empty());
    CHECK(featurize("   ", fc).empty());
    CHECK(featurize("I hate X", fc) == featurize("I hate X", fc));
    CHECK(featurize("I HATE   x", fc) == featurize("i hate x", fc));
    const auto v = featurize("some words here", fc);
    CHECK(std::is_sorted(v.index.begin(), v.index.end()));
    CHECK(std::adjacent_find(v.index.begin(), v.index.end()) == v.index.end());
    double n2 = 0.0;
    for (float x : v.value) n2 += static_cast<double>(x) * x;
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-5));
    for (auto i : v.index) CHECK(i < fc.dimension);
  }

  TEST_CASE("spelling variant shares character n-grams but not word features") {
    FeatureConfig fc;
    auto a = feature_strings("I h4te X", fc);
    auto b = feature_strings("I hate X", fc);
    std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::size_t shared_chars = 0, shared_words = 0;
    for (const auto& s : sa) {
      if (!sb.contains(s)) continue;
      (s[0] == 'c' ? shared_chars : shared_words)++;
    }
    CHECK(shared_chars > 0);
    CHECK(sa.contains("w1:h4te"));
    CHECK_FALSE(sb.contains("w1:h4te"));
    CHECK(sb.contains("w1:hate"));
  }

  TEST_CASE("normalization and tokenization") {
    CHECK(normalize_text("  Ｈｅｌｌｏ\tWORLD  ") == "hello world");
    CHECK(tokenize("\"hello,\" (world)!") == std::vector<std::string>{"hello", "world"});
  }

  TEST_CASE("feature config validation") {
    FeatureConfig fc;
    fc.dimension = 1000;
    CHECK_THROWS_AS(fc.validate(), ConfigError);
    fc.dimension = 1;
    CHECK_THROWS_AS(fc.validate(), ConfigError);
    fc.dimension = 2;
    fc.word_orders.clear();
    fc.char_orders.clear();
    CHECK_THROWS_AS(fc.validate(), ConfigError);
  }

  TEST_CASE("serial and parallel kernels agree bit for bit") {
    const auto suite = synth_hatecheck(2);
    std::vector<std::string> texts;
    for (const auto& c : suite.cases()) texts.push_back(c.text);
    const auto fc = small_features();
    const auto xs = kernels::featurize_serial(texts, fc);
    const auto xp = kernels::featurize_parallel(texts, fc);
    CHECK(xs == xp);

    Rng rng(5);
    std::vector<double> params(2 * fc.dimension + 2);
    for (auto& p : params) p = rng.normal();
    std::vector<double> ps(xs.size()), pp(xs.size());
    kernels::predict_serial(params, fc.dimension, xs, ps);
    kernels::predict_parallel(params, fc.dimension, xs, pp);
    CHECK(ps == pp);

    std::vector<double> g(params.size()), m1(params.size(), 0.0), v1(params.size(), 0.0);
    for (auto& x : g) x = rng.normal();
    auto a = params, b = params;
    auto m2 = m1, v2 = v1;
    for (std::int64_t t = 1; t <= 3; ++t) {
      kernels::adamw_step_serial(a, g, m1, v1, {}, t, 2 * fc.dimension);
      kernels::adamw_step_parallel(b, g, m2, v2, {}, t, 2 * fc.dimension);
    }
    CHECK(a == b);
    CHECK(m1 == m2);
    CHECK(v1 == v2);
  }

  TEST_CASE("AdamW: zero gradient and zero weight decay leaves weights unchanged") {
    std::vector<double> params{0.5, -1.25, 3.0, 0.0};
    const auto before = params;
    std::vector<double> g(4, 0.0), m(4, 0.0), v(4, 0.0);
    kernels::AdamWParams p;
    p.weight_decay = 0.0;
    for (std::int64_t t = 1; t <= 5; ++t) kernels::adamw_step_serial(params, g, m, v, p, t, 2);
    CHECK(params == before);
  }

  TEST_CASE("gradient check on random small models") {
    Rng rng(77);
    for (int t = 0; t < 20; ++t) {
      const auto prob = oracle::small_problem(rng);
      CHECK(oracle::gradient_relative_error(prob.model, prob.x, prob.y, prob.weights) < 1e-4);
    }
  }

  TEST_CASE("zero model predicts 0.5 and the threshold is inclusive") {
    const auto fc = small_features();
    const auto m = TrainedModel::zeros(fc);
    const std::vector<std::string> ids{"1", "2"}, texts{"anything", ""};
    const auto p = predict(m, ids, texts);
    CHECK(p.at("1") == 0.5);
    CHECK(p.at("2") == 0.5);
    CHECK(hard_label(0.5) == Label::Hateful);
    CHECK(hard_label(std::nextafter(0.5, 0.0)) == Label::NonHateful);
  }

  TEST_CASE("separable data reaches training accuracy 1") {
    const auto fc = small_features();
    const auto data = separable_set(fc);
    HyperParams hp;
    hp.learning_rate = 0.1;
    hp.batch_size = 4;
    hp.epochs = 30;
    const auto m = train(data, hp, 1);
    CHECK(training_accuracy(m, data) == 1.0);
    CHECK(m.lineage.size() == 1);
    CHECK(m.lineage[0].dataset_id == "separable");
  }

  TEST_CASE("warm start with zero epochs is an exact identity") {
    const auto fc = small_features();
    const auto data = separable_set(fc);
    HyperParams hp;
    hp.epochs = 5;
    const auto m = train(data, hp, 3);
    hp.epochs = 0;
    const auto same = train(data, hp, 99, &m);
    CHECK(same == m);
    hp.epochs = 2;
    const auto further = train(data, hp, 4, &m);
    CHECK(further.lineage.size() == 2);
    CHECK(further.params != m.params);
  }

  TEST_CASE("seeded runs are bit-identical") {
    const auto fc = small_features();
    const auto data = separable_set(fc);
    HyperParams hp;
    hp.epochs = 4;
    hp.batch_size = 3;
    const auto a = train(data, hp, 12);
    const auto b = train(data, hp, 12);
    CHECK(a.params == b.params);
    const auto c = train(data, hp, 13);
    CHECK(a.params != c.params);
  }

  TEST_CASE("training errors") {
    const auto fc = small_features();
    auto data = separable_set(fc);
    std::vector<std::size_t> hateful_only;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.y[i] == Label::Hateful) hateful_only.push_back(i);
    }
    CHECK_THROWS_AS(train(data.subset(hateful_only, "one-class"), {}, 1), Error);
    HyperParams wild;
    wild.learning_rate = 1e300;
    wild.epochs = 3;
    CHECK_THROWS_WITH_AS(train(data, wild, 1), doctest::Contains("diverged"), Error);
    FeatureConfig other = fc;
    other.dimension = 1u << 10;
    const auto m = TrainedModel::zeros(other);
    CHECK_THROWS_AS(train(data, {}, 1, &m), Error);
  }

  TEST_CASE("class weighting improves minority recall on imbalanced data") {
    const auto fc = small_features();
    const TaskCorpusSpec spec{"imb", TaskStyle::Davidson, 2000, 0.05};
    const auto rows = synth_task_corpus(spec, 8);
    const auto rule = collapse_rule_for(spec.style);
    std::vector<std::string> ids, texts;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ids.push_back(rows[i].id);
      // Blur the signal so neither model is perfect.
      texts.push_back(i % 3 == 0 ? rows[i].text.substr(0, rows[i].text.size() / 2) : rows[i].text);
      labels.push_back(rule.apply(rows[i].label));
    }
    const auto data = make_feature_set("imb", fc, ids, texts, labels);
    double weighted = 0.0, unweighted = 0.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      HyperParams hp;
      hp.epochs = 2;
      hp.learning_rate = 0.01;
      auto recall = [&](const TrainedModel& m) {
        const auto p = predict(m, data);
        double tp = 0, pos = 0;
        for (std::size_t i = 0; i < data.size(); ++i) {
          if (data.y[i] != Label::Hateful) continue;
          ++pos;
          tp += hard_label(p.at(data.ids[i])) == Label::Hateful;
        }
        return tp / pos;
      };
      weighted += recall(train(data, hp, seed));
      hp.class_weighted = false;
      unweighted += recall(train(data, hp, seed));
    }
    CHECK(weighted >= unweighted);
  }

  TEST_CASE("grid selection") {
    const std::vector<std::optional<double>> two{0.4, 0.3};
    CHECK(select_grid_point(two) == 1);
    const std::vector<std::optional<double>> one{0.7};
    CHECK(select_grid_point(one) == 0);
    const std::vector<std::optional<double>> tie{0.3, 0.2, 0.2};
    CHECK(select_grid_point(tie) == 1);
    const std::vector<std::optional<double>> gaps{std::nullopt, 0.5, std::nullopt};
    CHECK(select_grid_point(gaps) == 1);
    const std::vector<std::optional<double>> none{std::nullopt, std::nullopt};
    CHECK_THROWS_AS(select_grid_point(none), Error);
  }

  TEST_CASE("grid search is deterministic across thread counts") {
    const auto fc = small_features();
    const auto data = separable_set(fc);
    GridSpec g;
    g.learning_rates = {0.3, 0.03};
    g.batch_sizes = {4, 8};
    g.epochs = {2, 5};
    kernels::set_threads(1);
    const auto a = grid_search(data, data, g, 5);
    kernels::set_threads(4);
    const auto b = grid_search(data, data, g, 5);
    kernels::set_threads(1);
    CHECK(a.selected == b.selected);
    CHECK(a.model == b.model);
    CHECK(a.points.size() == 8);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].validation_loss == b.points[i].validation_loss);
      CHECK(*a.points[i].validation_loss >= a.validation_loss);
    }
    CHECK(g.points()[1].epochs == 5);
    CHECK(g.points()[2].batch_size == 8);
  }

  TEST_CASE("checkpoint round-trip") {
    const auto dir = test::scratch_dir("trainer-ckpt");
    const auto fc = small_features();
    const auto m = train(separable_set(fc), {}, 2);
    m.save(dir / "m.bin");
    CHECK(TrainedModel::load(dir / "m.bin") == m);
    {
      std::ofstream f(dir / "junk.bin");
      f << "not a model";
    }
    CHECK_THROWS_AS(TrainedModel::load(dir / "junk.bin"), Error);
  }

  TEST_CASE("external predictions") {
    const auto two = parse_external_predictions("{\"id\":\"a\",\"p_hateful\":0.2}\n{\"id\":7,\"p_hateful\":1}\n", "x");
    CHECK(two.size() == 2);
    CHECK(two.at("7") == 1.0);
    CHECK(two.source() == PredictionSource::External);
    CHECK_THROWS_WITH_AS(parse_external_predictions("{\"id\":\"bad\",\"p_hateful\":1.3}\n", "x"),
                         doctest::Contains("bad"), Error);
    CHECK_THROWS_WITH_AS(
        parse_external_predictions("{\"id\":\"d\",\"p_hateful\":0.1}\n{\"id\":\"d\",\"p_hateful\":0.2}\n", "x"),
        doctest::Contains("'d'"), Error);
    CHECK_THROWS_WITH_AS(parse_external_predictions("{\"id\":\"m\"}\n", "x"), doctest::Contains("malformed"), Error);
    CHECK_THROWS_WITH_AS(parse_external_predictions("not json\n", "x"), doctest::Contains("line 1"), Error);

    const auto dir = test::scratch_dir("trainer-preds");
    two.write_jsonl(dir / "p.jsonl");
    const auto back = load_external_predictions(dir / "p.jsonl");
    CHECK(back.entries() == two.entries());
  }
}
