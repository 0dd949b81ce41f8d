#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace behave {

/// Raised for malformed input, contract violations and runtime failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid configuration or usage; the CLI maps it to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Label : std::uint8_t { NonHateful = 0, Hateful = 1 };

inline constexpr int kNumClasses = 2;

inline std::string_view to_string(Label l) {
  return l == Label::Hateful ? "hateful" : "non-hateful";
}

inline int class_index(Label l) { return static_cast<int>(l); }

/// Grouping axis of a test suite. `None` marks plans without a held-out set.
enum class Axis : std::uint8_t { None, Functionality, Identity, Class };

std::string_view to_string(Axis a);
/// Accepts "none", "functionality"/"func", "identity"/"ident", "class".
std::optional<Axis> parse_axis(std::string_view s);
/// Scheme name used in report keys: All, FuncOut, IdentOut, ClassOut.
std::string_view scheme_name(Axis a);

/// Accepts "hateful"/"non-hateful" (plus "1"/"0"), case-insensitive.
std::optional<Label> parse_label(std::string_view s);

/// Exact ratio kept alongside its double value so reports carry integer counts.
struct Fraction {
  std::int64_t numerator = 0;
  std::int64_t denominator = 0;

  double value() const {
    return denominator == 0 ? 0.0
                            : static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

std::string trim(std::string_view s);
std::string ascii_lower(std::string_view s);

}  // namespace behave
