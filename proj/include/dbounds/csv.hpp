#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dbounds {

/// A parsed comma-separated table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header, if present.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Parses RFC 4180 style CSV (quoted fields, doubled quotes, CRLF or LF).
/// Rows whose width differs from the header raise Error(ParseError).
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

/// Parses a decimal number with '.' as separator; nullopt on junk.
std::optional<double> parse_number(std::string_view text);

}  // namespace dbounds
