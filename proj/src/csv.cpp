#include "ddu/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "ddu/errors.hpp"

namespace ddu {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

bool parse_double(const std::string &field, double &out) {
  if (field.empty()) return false;
  const char *first = field.data();
  const char *last = field.data() + field.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

CsvTable read_numeric_csv(std::istream &in) {
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size() && numeric; ++i)
      numeric = parse_double(cells[i], row[i]);
    if (!numeric) {
      if (first) {
        table.header = std::move(cells);
        first = false;
        continue;
      }
      throw ParseError("non-numeric field in data row", lineno);
    }
    first = false;
    table.rows.push_back(std::move(row));
    table.line_numbers.push_back(lineno);
  }
  if (!table.header.empty() && !table.rows.empty() &&
      table.header.size() != table.rows.front().size())
    throw ParseError("header has " + std::to_string(table.header.size()) +
                         " columns but data has " +
                         std::to_string(table.rows.front().size()),
                     table.line_numbers.front());
  return table;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv_row(std::ostream &out, const std::vector<std::string> &cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

void write_csv_row(std::ostream &out, const std::vector<double> &cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << format_double(cells[i]);
  }
  out << '\n';
}

}  // namespace ddu
