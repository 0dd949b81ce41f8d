#include "behave/common.hpp"

#include <algorithm>
#include <cctype>

namespace behave {

std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<Label> parse_label(std::string_view s) {
  const std::string v = ascii_lower(trim(s));
  if (v == "hateful" || v == "1") return Label::Hateful;
  if (v == "non-hateful" || v == "non_hateful" || v == "nonhateful" || v == "0") {
    return Label::NonHateful;
  }
  return std::nullopt;
}

std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::None: return "none";
    case Axis::Functionality: return "functionality";
    case Axis::Identity: return "identity";
    case Axis::Class: return "class";
  }
  return "none";
}

std::optional<Axis> parse_axis(std::string_view s) {
  const std::string v = ascii_lower(trim(s));
  if (v == "none" || v == "all") return Axis::None;
  if (v == "functionality" || v == "func" || v == "funcout") return Axis::Functionality;
  if (v == "identity" || v == "ident" || v == "identout") return Axis::Identity;
  if (v == "class" || v == "classout") return Axis::Class;
  return std::nullopt;
}

std::string_view scheme_name(Axis a) {
  switch (a) {
    case Axis::None: return "All";
    case Axis::Functionality: return "FuncOut";
    case Axis::Identity: return "IdentOut";
    case Axis::Class: return "ClassOut";
  }
  return "All";
}

}  // namespace behave
