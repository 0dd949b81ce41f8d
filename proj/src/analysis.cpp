#include "behave/analysis.hpp"

#include <algorithm>
#include <numeric>

namespace behave {

using nlohmann::json;

json DeltaRecord::to_json() const {
  return {{"id", id},
          {"gold", to_string(gold)},
          {"p_before", p_before},
          {"p_after", p_after},
          {"delta", delta}};
}

DeltaRecord make_delta_record(std::string id, Label gold, double p_before, double p_after) {
  if (!(p_before >= 0.0 && p_before <= 1.0) || !(p_after >= 0.0 && p_after <= 1.0)) {
    throw Error("delta_p: probability outside [0, 1] for " + id);
  }
  return {std::move(id), gold, p_before, p_after, p_after - p_before};
}

std::vector<DeltaRecord> delta_p(const PredictionSet& before, const PredictionSet& after,
                                 const GoldLabels& gold) {
  std::vector<std::string> missing;
  std::vector<DeltaRecord> out;
  out.reserve(gold.size());
  for (const auto& [id, g] : gold) {
    const auto b = before.find(id);
    const auto a = after.find(id);
    if (!b || !a) {
      missing.push_back(id + (b ? " (after)" : a ? " (before)" : " (before, after)"));
      continue;
    }
    const auto gold_prob = [g = g](double p) { return g == Label::Hateful ? p : 1.0 - p; };
    out.push_back(make_delta_record(id, g, gold_prob(*b), gold_prob(*a)));
  }
  if (!missing.empty()) {
    std::string msg = "delta_p: missing predictions for";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += (i ? ", " : " ") + missing[i];
    if (missing.size() > 20) msg += ", ... (" + std::to_string(missing.size()) + " total)";
    throw Error(msg);
  }
  return out;
}

std::string_view to_string(ExtremeCategory c) {
  switch (c) {
    case ExtremeCategory::DeteriorationHateful: return "largest_deterioration_hateful";
    case ExtremeCategory::DeteriorationNonHateful: return "largest_deterioration_non_hateful";
    case ExtremeCategory::ImprovementHateful: return "largest_improvement_hateful";
    case ExtremeCategory::ImprovementNonHateful: return "largest_improvement_non_hateful";
  }
  return "";
}

namespace {

Label category_label(ExtremeCategory c) {
  return c == ExtremeCategory::DeteriorationHateful || c == ExtremeCategory::ImprovementHateful
             ? Label::Hateful
             : Label::NonHateful;
}

bool is_improvement(ExtremeCategory c) {
  return c == ExtremeCategory::ImprovementHateful || c == ExtremeCategory::ImprovementNonHateful;
}

}  // namespace

std::array<std::vector<std::size_t>, 4> top_k_extremes(std::span<const DeltaRecord> records,
                                                       std::size_t k) {
  std::array<std::vector<std::size_t>, 4> out;
  for (std::size_t ci = 0; ci < 4; ++ci) {
    const auto cat = kExtremeCategories[ci];
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].gold == category_label(cat)) pos.push_back(i);
    }
    const bool up = is_improvement(cat);
    std::stable_sort(pos.begin(), pos.end(), [&](std::size_t x, std::size_t y) {
      return up ? records[x].delta > records[y].delta : records[x].delta < records[y].delta;
    });
    if (pos.size() > k) pos.resize(k);
    out[ci] = std::move(pos);
  }
  return out;
}

ExtremeSelection select_extremes(std::span<const DeltaRecord> records) {
  const auto top = top_k_extremes(records, 1);
  ExtremeSelection s;
  for (std::size_t ci = 0; ci < 4; ++ci) {
    if (top[ci].empty()) {
      throw Error(std::string("select_extremes: no ") +
                  std::string(to_string(category_label(kExtremeCategories[ci]))) + " records");
    }
    s.index[ci] = top[ci].front();
    s.id[ci] = records[s.index[ci]].id;
  }
  return s;
}

}  // namespace behave
