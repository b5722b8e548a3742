#include "tailmax/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tailmax/errors.hpp"

namespace tailmax {

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return c;
  }
  fail(ErrorCode::UnknownColumn, "column '" + std::string(name) + "' not found");
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& cell : out) {
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.pop_back();
    std::size_t lead = 0;
    while (lead < cell.size() && (cell[lead] == ' ' || cell[lead] == '\t')) ++lead;
    cell.erase(0, lead);
  }
  return out;
}

CsvTable parse_csv(std::string_view text, const std::string& origin) {
  CsvTable table;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool have_header = false;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (line.empty()) {
      if (end >= text.size()) break;
      continue;
    }
    auto cells = split(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != table.header.size()) {
        fail(ErrorCode::ParseError, origin + " line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(table.header.size()) + " cells, found " +
                                        std::to_string(cells.size()));
      }
      table.rows.push_back(std::move(cells));
    }
    if (end >= text.size()) break;
  }
  if (!have_header) fail(ErrorCode::ParseError, origin + ": missing header line");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path);
}

double parse_double(std::string_view cell, const std::string& where) {
  if (cell.empty()) fail(ErrorCode::ParseError, where + ": empty cell");
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    fail(ErrorCode::ParseError, where + ": '" + std::string(cell) + "' is not a finite number");
  }
  return value;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

std::string format_exact(double value) { return fmt::format("{:.17g}", value); }

std::string format_sig6(double value) { return fmt::format("{:.6g}", value); }

}  // namespace tailmax
