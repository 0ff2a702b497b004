#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace soilml::csv {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

/// Strict double parse of one field. Accepts surrounding spaces, rejects
/// anything else left over. Throws ValidationError.
double parse_double(std::string_view field);

/// Split one line on a delimiter. No quoting rules; none of the formats
/// handled here use quoted fields.
std::vector<std::string> split(std::string_view line, char delim = ',');

struct Table {
  std::vector<std::string> header;  // empty when the file has no header row
  std::vector<std::vector<std::string>> rows;

  std::size_t cols() const {
    if (!header.empty()) return header.size();
    return rows.empty() ? 0 : rows.front().size();
  }
};

/// Parse CSV text. Blank lines are skipped, CR before LF is dropped, and a
/// ragged row raises ParseError tagged with `name` and the 1-based line.
Table parse(std::string_view text, const std::string& name, bool has_header);

Table read_file(const std::string& path, bool has_header);

/// Plain-text config lines `key = value`. '#' starts a comment, blank lines
/// are skipped, keys and values are trimmed. Order preserved, duplicates
/// kept. A line without '=' raises ParseError.
std::vector<std::pair<std::string, std::string>> parse_keyvalue(
    std::string_view text, const std::string& name);

std::vector<std::pair<std::string, std::string>> read_keyvalue_file(
    const std::string& path);

std::string to_string(const Table& t);

void write_file(const std::string& path, const Table& t);

}  // namespace soilml::csv
