#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mpvr {

// Emission contract: header row, '.' decimal separator, scientific notation
// for sub-micro magnitudes (%g takes care of that), trailing newline. Output
// bytes are a pure function of the table contents.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;  // emitted first, '#'-prefixed

  void add_row(std::vector<std::string> row);
};

void write_csv(std::ostream& os, const CsvTable& table);
std::string to_csv(const CsvTable& table);

// Strict reader for our own output: '#' comments skipped, every row must
// match the header width. Used by the round-trip checks.
CsvTable parse_csv(const std::string& text);

}  // namespace mpvr
