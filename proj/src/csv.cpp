#include "behave/csv.hpp"

#include <fstream>
#include <iterator>

#include "behave/common.hpp"

namespace behave::csv {

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

// Parses a whole buffer; returns rows with their starting line numbers.
void parse(std::string_view buf, char delim, std::vector<Row>& rows,
           std::vector<std::size_t>& lines) {
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t row_line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    // A blank physical line yields a single empty field; skip it.
    if (!(row.size() == 1 && row[0].empty())) {
      rows.push_back(std::move(row));
      lines.push_back(row_line);
    }
    row.clear();
  };

  for (std::size_t i = 0; i < buf.size(); ++i) {
    const char c = buf[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < buf.size() && buf[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delim) {
      end_field();
    } else if (c == '\r') {
      // tolerated before \n
    } else if (c == '\n') {
      end_row();
      ++line;
      row_line = line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) {
    throw Error("unterminated quoted field starting on line " + std::to_string(row_line));
  }
  if (field_started || !row.empty()) end_row();
}

}  // namespace

Table read(std::istream& in, char delimiter) {
  std::string buf{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  // Strip a UTF-8 byte order mark.
  if (buf.size() >= 3 && buf.compare(0, 3, "\xEF\xBB\xBF") == 0) buf.erase(0, 3);

  std::vector<Row> rows;
  std::vector<std::size_t> lines;
  parse(buf, delimiter, rows, lines);

  Table t;
  if (rows.empty()) throw Error("missing header row");
  t.header = std::move(rows.front());
  t.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
  t.line_numbers.assign(lines.begin() + 1, lines.end());
  return t;
}

Table read_file(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read(in, delimiter);
}

void write_row(std::ostream& out, const Row& row, char delimiter) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << delimiter;
    const std::string& f = row[i];
    const bool quote = f.find_first_of(std::string{'"', '\n', '\r', delimiter}) != std::string::npos;
    if (!quote) {
      out << f;
      continue;
    }
    out << '"';
    for (char c : f) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  }
  out << '\n';
}

}  // namespace behave::csv
