#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace zinbspc {

/// Reads one count per row from a comma-separated file.
///
/// `column` selects the field: empty means the first column, a positive
/// integer is a 1-based column index, anything else is matched against the
/// header. A header is detected when the first non-blank row does not parse
/// as numbers. Blank lines are skipped and surrounding quotes are removed.
/// Throws ParseError (with a 1-based line) or NegativeCountError.
std::vector<std::int64_t> ingest_counts(const std::filesystem::path& path,
                                        const std::string& column = {});
std::vector<std::int64_t> read_counts(std::istream& in, const std::string& column = {});

/// Splits one CSV line on commas, trimming whitespace and double quotes.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace zinbspc
