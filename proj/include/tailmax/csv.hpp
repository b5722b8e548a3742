#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tailmax {

// Plain comma-separated text without quoting; the first line is the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name, or throws UnknownColumn.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::string_view text, const std::string& origin = "<memory>");

std::vector<std::string> split(std::string_view line, char sep = ',');

/// Parses a finite double; throws ParseError naming `where` otherwise.
double parse_double(std::string_view cell, const std::string& where);

void write_text_file(const std::string& path, const std::string& content);

/// Shortest round-trip ("{:.17g}") and 6-significant-digit formatting.
std::string format_exact(double value);
std::string format_sig6(double value);

}  // namespace tailmax
