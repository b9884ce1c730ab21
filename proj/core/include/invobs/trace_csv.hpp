#pragma once

#include <string>
#include <vector>

namespace invobs {

// Trace file layout: one "# " comment line with the run metadata, the column
// row, comma-separated values at 17 significant digits, and an optional final
// "# diagnostic=" line when the run was cut short.
struct CsvTable {
  std::string header;  // metadata line without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string diagnostic;

  // index of a column; ValidationError when absent
  std::size_t column(const std::string& name) const;
  std::vector<double> series(const std::string& name) const;
};

std::string format_double(double v);
std::string write_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

}  // namespace invobs
