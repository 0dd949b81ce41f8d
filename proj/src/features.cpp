#include "behave/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "behave/common.hpp"
#include "behave/rng.hpp"

namespace behave {

using nlohmann::json;

void FeatureConfig::validate() const {
  if (dimension < 2 || (dimension & (dimension - 1)) != 0) {
    throw ConfigError("feature dimension must be a power of two >= 2");
  }
  if (word_orders.empty() && char_orders.empty()) {
    throw ConfigError("at least one n-gram order must be enabled");
  }
  for (int n : word_orders) {
    if (n < 1) throw ConfigError("word n-gram orders must be >= 1");
  }
  for (int n : char_orders) {
    if (n < 1) throw ConfigError("character n-gram orders must be >= 1");
  }
}

json FeatureConfig::to_json() const {
  return {{"word_orders", word_orders},
          {"char_orders", char_orders},
          {"dimension", dimension},
          {"normalization", normalization == Normalization::L2 ? "l2" : "none"}};
}

FeatureConfig FeatureConfig::from_json(const json& j) {
  FeatureConfig c;
  c.word_orders = j.value("word_orders", c.word_orders);
  c.char_orders = j.value("char_orders", c.char_orders);
  c.dimension = j.value("dimension", c.dimension);
  const std::string norm = ascii_lower(j.value("normalization", std::string("l2")));
  if (norm == "l2") c.normalization = Normalization::L2;
  else if (norm == "none") c.normalization = Normalization::None;
  else throw ConfigError("normalization must be 'l2' or 'none'");
  c.validate();
  return c;
}

std::string normalize_text(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc_cf = icu::Normalizer2::getNFKCCasefoldInstance(status);
  std::string folded;
  if (U_SUCCESS(status)) {
    const icu::UnicodeString src = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
    const icu::UnicodeString dst = nfkc_cf->normalize(src, status);
    if (U_SUCCESS(status)) dst.toUTF8String(folded);
  }
  if (!U_SUCCESS(status)) folded = ascii_lower(text);

  std::string out;
  out.reserve(folded.size());
  bool pending_space = false;
  for (unsigned char c : folded) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view normalized) {
  auto is_punct = [](unsigned char c) {
    return c < 0x80 && std::ispunct(c) != 0;
  };
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < normalized.size()) {
    while (i < normalized.size() && normalized[i] == ' ') ++i;
    std::size_t j = i;
    while (j < normalized.size() && normalized[j] != ' ') ++j;
    std::size_t b = i;
    std::size_t e = j;
    while (b < e && is_punct(static_cast<unsigned char>(normalized[b]))) ++b;
    while (e > b && is_punct(static_cast<unsigned char>(normalized[e - 1]))) --e;
    if (e > b) tokens.emplace_back(normalized.substr(b, e - b));
    i = j;
  }
  return tokens;
}

namespace {

// Byte offsets of UTF-8 code point starts, plus the end offset.
std::vector<std::size_t> codepoint_offsets(std::string_view s) {
  std::vector<std::size_t> off;
  off.reserve(s.size() + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) off.push_back(i);
  }
  off.push_back(s.size());
  return off;
}

template <typename Sink>
void for_each_ngram(std::string_view text, const FeatureConfig& config, Sink&& sink) {
  const std::string norm = normalize_text(text);
  if (norm.empty()) return;

  const auto tokens = tokenize(norm);
  std::string buf;
  for (int n : config.word_orders) {
    const auto un = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + un <= tokens.size(); ++i) {
      buf = "w" + std::to_string(n) + ":";
      for (std::size_t k = 0; k < un; ++k) {
        if (k) buf.push_back(' ');
        buf += tokens[i + k];
      }
      sink(buf);
    }
  }

  const std::string padded = " " + norm + " ";
  const auto off = codepoint_offsets(padded);
  const std::size_t cps = off.size() - 1;
  for (int n : config.char_orders) {
    const auto un = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + un <= cps; ++i) {
      buf = "c" + std::to_string(n) + ":";
      buf.append(padded, off[i], off[i + un] - off[i]);
      sink(buf);
    }
  }
}

}  // namespace

std::vector<std::string> feature_strings(std::string_view text, const FeatureConfig& config) {
  std::vector<std::string> out;
  for_each_ngram(text, config, [&](const std::string& s) { out.push_back(s); });
  return out;
}

SparseVector featurize(std::string_view text, const FeatureConfig& config) {
  const std::uint32_t mask = config.dimension - 1;
  std::map<std::uint32_t, double> acc;
  for_each_ngram(text, config, [&](const std::string& s) {
    const std::uint64_t h = splitmix64(fnv1a64(s));
    const auto slot = static_cast<std::uint32_t>(h & mask);
    acc[slot] += (h >> 63) ? -1.0 : 1.0;
  });

  double norm = 0.0;
  for (const auto& [k, v] : acc) norm += v * v;
  norm = (config.normalization == Normalization::L2 && norm > 0.0) ? std::sqrt(norm) : 1.0;

  SparseVector out;
  out.index.reserve(acc.size());
  out.value.reserve(acc.size());
  for (const auto& [k, v] : acc) {
    if (v == 0.0) continue;
    out.index.push_back(k);
    out.value.push_back(static_cast<float>(v / norm));
  }
  return out;
}

}  // namespace behave
