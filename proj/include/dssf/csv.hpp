#pragma once

#include <string>
#include <variant>
#include <vector>

namespace dssf {

using CsvCell = std::variant<std::string, double, long long>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;

  void add(std::vector<CsvCell> row) { rows.push_back(std::move(row)); }
};

// 17 significant digits; scientific when |v| < 1e-3 or |v| > 1e6; '.' decimal
// point regardless of locale.
std::string format_number(double v);
// Shortest text that reads back to the same double (for messages and echoes).
std::string format_short(double v);
std::string format_cell(const CsvCell& c);

// RFC-4180 style text with '\n' line endings.
std::string to_csv(const CsvTable& t);
// Throws std::runtime_error with the OS message on I/O failure.
void write_csv(const CsvTable& t, const std::string& path);

}  // namespace dssf
