#include "zinbspc/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

#include "zinbspc/error.hpp"

namespace zinbspc {

namespace {

std::string trim(std::string s) {
  const auto keep = [](unsigned char c) { return !std::isspace(c) && c != '"'; };
  const auto first = std::find_if(s.begin(), s.end(), keep);
  const auto last = std::find_if(s.rbegin(), s.rend(), keep).base();
  if (first >= last) return {};
  return std::string(first, last);
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  double value = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc() && ptr == end;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) || c == ','; });
}

bool is_index(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (const char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

std::vector<std::int64_t> read_counts(std::istream& in, const std::string& column) {
  std::vector<std::int64_t> counts;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  std::size_t field = 0;
  const bool by_name = !column.empty() && !is_index(column);
  if (!column.empty() && !by_name) {
    const auto idx = std::stoull(column);
    if (idx == 0) throw ParseError("column index is 1-based", 0);
    field = idx - 1;
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    const auto fields = split_csv_line(line);

    if (first_row) {
      first_row = false;
      const bool header = !std::all_of(fields.begin(), fields.end(),
                                       [](const std::string& f) { return f.empty() || is_number(f); });
      if (by_name) {
        if (!header) throw ParseError("column '" + column + "' requested but the file has no header", line_no);
        const auto it = std::find(fields.begin(), fields.end(), column);
        if (it == fields.end()) throw ParseError("no column named '" + column + "'", line_no);
        field = static_cast<std::size_t>(it - fields.begin());
        continue;
      }
      if (header) continue;
    }

    if (field >= fields.size()) {
      throw ParseError("row has " + std::to_string(fields.size()) + " fields, column " +
                           std::to_string(field + 1) + " requested",
                       line_no);
    }
    const std::string& text = fields[field];
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
      throw ParseError("not a number: '" + text + "'", line_no);
    }
    if (value != std::floor(value)) throw ParseError("not an integer count: '" + text + "'", line_no);
    if (value < 0.0) throw NegativeCountError("negative count " + text, line_no);
    counts.push_back(static_cast<std::int64_t>(value));
  }
  return counts;
}

std::vector<std::int64_t> ingest_counts(const std::filesystem::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return read_counts(in, column);
}

}  // namespace zinbspc
