#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "behave/common.hpp"
#include "behave/evaluator.hpp"
#include "behave/trainer.hpp"

namespace behave {

/// Change of a sample's gold-label probability after suite fine-tuning.
struct DeltaRecord {
  std::string id;
  Label gold = Label::NonHateful;
  double p_before = 0.0;
  double p_after = 0.0;
  double delta = 0.0;

  nlohmann::json to_json() const;
};

/// Builds a record from gold-label probabilities; delta = p_after - p_before.
DeltaRecord make_delta_record(std::string id, Label gold, double p_before, double p_after);

/// One record per gold example in gold order. Predictions hold the hateful
/// probability, converted to the gold-label probability (1 - p for non-hateful).
std::vector<DeltaRecord> delta_p(const PredictionSet& before, const PredictionSet& after,
                                 const GoldLabels& gold);

enum class ExtremeCategory : std::uint8_t {
  DeteriorationHateful,
  DeteriorationNonHateful,
  ImprovementHateful,
  ImprovementNonHateful,
};

inline constexpr std::array<ExtremeCategory, 4> kExtremeCategories = {
    ExtremeCategory::DeteriorationHateful, ExtremeCategory::DeteriorationNonHateful,
    ExtremeCategory::ImprovementHateful, ExtremeCategory::ImprovementNonHateful};

std::string_view to_string(ExtremeCategory c);

/// Positions into the input records, one per category in kExtremeCategories order:
/// argmin over hateful, argmin over non-hateful, argmax over hateful, argmax over non-hateful.
struct ExtremeSelection {
  std::array<std::size_t, 4> index{};
  std::array<std::string, 4> id;
};

/// Ties go to the first occurrence in input order. Throws if a label set is empty.
ExtremeSelection select_extremes(std::span<const DeltaRecord> records);

/// Up to k positions per category, most extreme first; ties keep input order.
std::array<std::vector<std::size_t>, 4> top_k_extremes(std::span<const DeltaRecord> records,
                                                       std::size_t k = 5);

}  // namespace behave
