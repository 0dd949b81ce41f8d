#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace behave::csv {

using Row = std::vector<std::string>;

/// Delimited-text table with one header row. Quoting follows RFC 4180:
/// fields may be wrapped in double quotes, embedded quotes are doubled and
/// quoted fields may span lines.
struct Table {
  Row header;
  std::vector<Row> rows;
  /// 1-based physical line number where each row starts (header is line 1).
  std::vector<std::size_t> line_numbers;

  std::optional<std::size_t> column(std::string_view name) const;
};

Table read(std::istream& in, char delimiter = ',');
Table read_file(const std::filesystem::path& path, char delimiter = ',');

void write_row(std::ostream& out, const Row& row, char delimiter = ',');

}  // namespace behave::csv
