#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lexcomp::text {

/// One non-empty line of a tab-separated file, split into fields.
struct TsvRow {
  std::size_t line = 0;  // 1-based
  std::vector<std::string> fields;
};

/// Reads a UTF-8 TSV file. Blank lines are skipped, trailing CR is removed
/// and a leading BOM on the first line is dropped. Throws InputError when the
/// file cannot be opened.
std::vector<TsvRow> read_tsv(const std::filesystem::path& path);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view s);

/// Strict full-string parses; throw InputError with `where` in the message.
double parse_double(std::string_view s, std::string_view where);
long long parse_int(std::string_view s, std::string_view where);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);
/// Fixed-point with the given number of decimals; "-0.00" is printed as "0.00".
std::string format_fixed(double v, int decimals);
/// Four significant digits, or "<1e-4" below that resolution.
std::string format_pvalue(double p);

/// Unicode code points of a UTF-8 string, each returned as its UTF-8 bytes.
/// Throws InputError on malformed sequences.
std::vector<std::string> code_points(std::string_view utf8);

std::string to_lower(std::string_view s);

}  // namespace lexcomp::text
