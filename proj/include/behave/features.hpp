#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace behave {

enum class Normalization : std::uint8_t { None, L2 };

struct FeatureConfig {
  std::vector<int> word_orders{1, 2};
  std::vector<int> char_orders{2, 3, 4};
  std::uint32_t dimension = 1u << 18;
  Normalization normalization = Normalization::L2;

  /// Throws ConfigError when the dimension is not a power of two >= 2 or no
  /// n-gram order is enabled.
  void validate() const;

  nlohmann::json to_json() const;
  static FeatureConfig from_json(const nlohmann::json& j);
  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

/// Sorted, duplicate-free sparse vector.
struct SparseVector {
  std::vector<std::uint32_t> index;
  std::vector<float> value;

  std::size_t nnz() const { return index.size(); }
  bool empty() const { return index.empty(); }
  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// NFKC case-folded text with whitespace runs collapsed to one space and trimmed.
std::string normalize_text(std::string_view text);

/// Word tokens of normalized text; leading/trailing ASCII punctuation is stripped.
std::vector<std::string> tokenize(std::string_view normalized);

/// Raw n-gram strings that feed the hash, tagged by kind ("w2:i hate", "c3: ha").
std::vector<std::string> feature_strings(std::string_view text, const FeatureConfig& config);

/// Signed hashing of word and character n-grams into `config.dimension` slots.
SparseVector featurize(std::string_view text, const FeatureConfig& config);

}  // namespace behave
