#pragma once

// CSV reading/writing and locale-independent number formatting.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace capenc::text {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

/// Fixed-point formatting, used for display-only output such as SVG.
std::string format_fixed(double value, int decimals);

/// Parses the whole string as a double ('.' decimal separator). Surrounding
/// blanks are ignored. Returns nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<unsigned long long> parse_unsigned(std::string_view text);

std::string_view trim(std::string_view text);

using CsvRow = std::vector<std::string>;

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
/// Blank lines are skipped.
std::vector<CsvRow> parse_csv(std::string_view text);

/// Quotes a field only when it contains a separator, quote or newline.
std::string csv_escape(std::string_view field);
std::string csv_line(const CsvRow& row);

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename so readers never see partial output.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Levenshtein edit distance, for "did you mean" suggestions.
std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace capenc::text
