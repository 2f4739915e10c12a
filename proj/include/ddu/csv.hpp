#ifndef DDU_CSV_HPP
#define DDU_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ddu {

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

/// Comma-separated numeric table. A first line that does not parse as numbers
/// is taken as the header; blank lines are skipped.
CsvTable read_numeric_csv(std::istream &in);

std::vector<std::string> split_csv_line(const std::string &line);
bool parse_double(const std::string &field, double &out);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

void write_csv_row(std::ostream &out, const std::vector<std::string> &cells);
void write_csv_row(std::ostream &out, const std::vector<double> &cells);

}  // namespace ddu

#endif  // DDU_CSV_HPP
