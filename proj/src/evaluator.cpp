#include "behave/evaluator.hpp"

#include <algorithm>
#include <set>

namespace behave {

using nlohmann::json;

json fraction_json(const Fraction& f) {
  return {{"correct", f.numerator}, {"total", f.denominator}, {"value", f.value()}};
}

HardPredictions hard_predictions(const PredictionSet& preds) {
  HardPredictions out;
  for (const auto& [id, p] : preds.entries()) out.emplace(id, hard_label(p));
  return out;
}

namespace {

std::string list_ids(const std::vector<std::string>& ids) {
  std::string s;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) s += ", ";
    s += ids[i];
  }
  if (ids.size() > shown) s += ", ... (" + std::to_string(ids.size()) + " total)";
  return s;
}

}  // namespace

std::vector<Record> align_exact(const HardPredictions& preds, const GoldLabels& gold) {
  if (gold.empty()) throw Error("empty evaluation set");
  std::vector<Record> out;
  out.reserve(gold.size());
  std::vector<std::string> missing;
  std::set<std::string, std::less<>> gold_ids;
  for (const auto& [id, g] : gold) {
    gold_ids.insert(id);
    auto it = preds.find(id);
    if (it == preds.end()) {
      missing.push_back(id);
      continue;
    }
    out.push_back({id, it->second, g});
  }
  std::vector<std::string> extra;
  for (const auto& [id, p] : preds) {
    if (!gold_ids.contains(id)) extra.push_back(id);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "prediction coverage mismatch:";
    if (!missing.empty()) msg += " missing ids [" + list_ids(missing) + "]";
    if (!extra.empty()) msg += " extra ids [" + list_ids(extra) + "]";
    throw Error(msg);
  }
  return out;
}

std::vector<Record> align_covering(const PredictionSet& preds, const GoldLabels& gold) {
  if (gold.empty()) throw Error("empty evaluation set");
  std::vector<Record> out;
  out.reserve(gold.size());
  std::vector<std::string> missing;
  for (const auto& [id, g] : gold) {
    const auto p = preds.find(id);
    if (!p) {
      missing.push_back(id);
      continue;
    }
    out.push_back({id, hard_label(*p), g});
  }
  if (!missing.empty()) throw Error("missing predictions for ids [" + list_ids(missing) + "]");
  return out;
}

Fraction accuracy(std::span<const Record> records) {
  if (records.empty()) throw Error("empty evaluation set");
  Fraction f{0, static_cast<std::int64_t>(records.size())};
  for (const auto& r : records) f.numerator += r.correct() ? 1 : 0;
  return f;
}

Fraction accuracy(const HardPredictions& preds, const GoldLabels& gold) {
  return accuracy(align_exact(preds, gold));
}

Confusion Confusion::of(std::span<const Record> records) {
  Confusion c;
  for (const auto& r : records) {
    const bool pred_pos = r.predicted == Label::Hateful;
    const bool gold_pos = r.gold == Label::Hateful;
    if (pred_pos && gold_pos) ++c.tp;
    else if (pred_pos) ++c.fp;
    else if (gold_pos) ++c.fn;
    else ++c.tn;
  }
  return c;
}

namespace {

double f1_from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  // 2PR/(P+R) == 2TP/(2TP+FP+FN); both are 0/0 -> 0 in the degenerate cases.
  const std::int64_t den = 2 * tp + fp + fn;
  return den == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(den);
}

}  // namespace

json F1Scores::to_json() const {
  return {{"hateful", per_class[class_index(Label::Hateful)]},
          {"non_hateful", per_class[class_index(Label::NonHateful)]},
          {"macro", macro},
          {"micro", micro},
          {"confusion",
           {{"tp", confusion.tp}, {"fp", confusion.fp}, {"fn", confusion.fn}, {"tn", confusion.tn}}}};
}

F1Scores f1_scores(std::span<const Record> records) {
  if (records.empty()) throw Error("empty evaluation set");
  F1Scores s;
  s.confusion = Confusion::of(records);
  const auto& c = s.confusion;
  s.per_class[class_index(Label::Hateful)] = f1_from_counts(c.tp, c.fp, c.fn);
  // non-hateful as positive: its TP is tn, FP is fn, FN is fp
  s.per_class[class_index(Label::NonHateful)] = f1_from_counts(c.tn, c.fn, c.fp);
  s.macro = (s.per_class[0] + s.per_class[1]) / 2.0;
  s.micro = f1_from_counts(c.tp + c.tn, c.fp + c.fn, c.fn + c.fp);
  return s;
}

F1Scores f1_scores(const HardPredictions& preds, const GoldLabels& gold) {
  return f1_scores(align_exact(preds, gold));
}

double macro_f1(std::span<const Label> predicted, std::span<const Label> gold) {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predicted[i] == Label::Hateful;
    const bool g = gold[i] == Label::Hateful;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
    tn += !p && !g;
  }
  return (f1_from_counts(tp, fp, fn) + f1_from_counts(tn, fn, fp)) / 2.0;
}

json PlanEval::to_json(bool with_records) const {
  json j = {{"plan", plan},
            {"axis", to_string(axis)},
            {"key", key ? json(*key) : json(nullptr)},
            {"covered_test_accuracy", fraction_json(covered_test_accuracy)},
            {"full_test_accuracy", fraction_json(full_test_accuracy)},
            {"heldout_test_count", heldout_test_predictions.size()}};
  if (heldout_validation_accuracy) {
    j["heldout_validation_accuracy"] = fraction_json(*heldout_validation_accuracy);
  }
  if (with_records) {
    json recs = json::array();
    for (const auto& r : heldout_test_predictions) {
      recs.push_back({r.id, to_string(r.predicted), to_string(r.gold)});
    }
    j["heldout_test_predictions"] = recs;
  }
  return j;
}

PlanEval evaluate_plan(const PredictionSet& preds, const SplitPlan& plan, const TestSuite& suite) {
  PlanEval e;
  e.plan = plan.name();
  e.axis = plan.axis;
  e.key = plan.key;

  GoldLabels test_gold;
  for (const auto& id : plan.test) {
    const auto* c = suite.find(id);
    if (!c) throw Error("plan " + plan.name() + " references unknown case " + id);
    test_gold.emplace_back(id, c->gold);
  }
  const auto records = test_gold.empty() ? std::vector<Record>{} : align_covering(preds, test_gold);
  for (const auto& r : records) {
    if (plan.is_heldout(*suite.find(r.id), suite)) e.heldout_test_predictions.push_back(r);
    else e.covered_test_records.push_back(r);
  }
  e.full_test_accuracy = Fraction{0, static_cast<std::int64_t>(records.size())};
  for (const auto& r : records) e.full_test_accuracy.numerator += r.correct();
  e.covered_test_accuracy = Fraction{0, static_cast<std::int64_t>(e.covered_test_records.size())};
  for (const auto& r : e.covered_test_records) e.covered_test_accuracy.numerator += r.correct();

  if (plan.axis != Axis::None) {
    Fraction v{0, 0};
    bool complete = true;
    for (const auto& id : plan.validation) {
      const auto* c = suite.find(id);
      if (!c || !plan.is_heldout(*c, suite)) continue;
      const auto p = preds.find(id);
      if (!p) {
        complete = false;
        break;
      }
      ++v.denominator;
      v.numerator += hard_label(*p) == c->gold;
    }
    if (complete && v.denominator > 0) e.heldout_validation_accuracy = v;
  }
  return e;
}

json AggregateReport::to_json() const {
  json rows = json::array();
  for (const auto& r : per_key) {
    rows.push_back({{"key", r.key},
                    {"covered", fraction_json(r.covered)},
                    {"heldout", fraction_json(r.heldout)}});
  }
  return {{"axis", to_string(axis)},
          {"scheme", scheme_name(axis)},
          {"plans", plans},
          {"heldout_union_accuracy", fraction_json(heldout_union_accuracy)},
          {"mean_covered_accuracy", mean_covered_accuracy},
          {"covered_minus_heldout", gap()},
          {"per_key", rows}};
}

AggregateReport aggregate_holdout(std::span<const PlanEval> evals) {
  if (evals.empty()) throw Error("aggregate: no plan evaluations");
  AggregateReport r;
  r.axis = evals.front().axis;
  r.plans = evals.size();
  double covered_sum = 0.0;
  std::size_t covered_n = 0;
  for (const auto& e : evals) {
    if (e.axis != r.axis) throw Error("aggregate: plan evaluations mix axes");
    Fraction h{0, static_cast<std::int64_t>(e.heldout_test_predictions.size())};
    for (const auto& rec : e.heldout_test_predictions) h.numerator += rec.correct();
    r.heldout_union_accuracy.numerator += h.numerator;
    r.heldout_union_accuracy.denominator += h.denominator;
    if (e.covered_test_accuracy.denominator > 0) {
      covered_sum += e.covered_test_accuracy.value();
      ++covered_n;
    }
    r.per_key.push_back({e.key.value_or(""), e.covered_test_accuracy, h});
  }
  if (r.heldout_union_accuracy.denominator == 0) {
    throw Error("aggregate: no held-out test predictions");
  }
  r.mean_covered_accuracy = covered_n ? covered_sum / static_cast<double>(covered_n) : 0.0;
  return r;
}

std::vector<BreakdownRow> breakdown(const PredictionSet& preds, const TestSuite& suite, Axis axis,
                                    std::span<const std::string> case_ids) {
  if (axis == Axis::None) throw Error("breakdown requires an axis");
  std::vector<const TestCase*> scope;
  if (case_ids.empty()) {
    for (const auto& c : suite.cases()) scope.push_back(&c);
  } else {
    for (const auto& id : case_ids) {
      const auto* c = suite.find(id);
      if (!c) throw Error("breakdown: unknown case " + id);
      scope.push_back(c);
    }
  }
  std::map<std::string, Fraction, std::less<>> acc;
  std::vector<std::string> missing;
  for (const auto* c : scope) {
    const auto key = suite.key_of(*c, axis);
    if (!key) continue;
    const auto p = preds.find(c->case_id);
    if (!p) {
      missing.push_back(c->case_id);
      continue;
    }
    auto& f = acc[*key];
    ++f.denominator;
    f.numerator += hard_label(*p) == c->gold;
  }
  if (!missing.empty()) throw Error("breakdown: missing predictions for ids [" + list_ids(missing) + "]");
  std::vector<BreakdownRow> out;
  for (const auto& k : suite.keys(axis)) {
    auto it = acc.find(k);
    if (it != acc.end() && it->second.denominator > 0) out.push_back({k, it->second});
  }
  return out;
}

}  // namespace behave
