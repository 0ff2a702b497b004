#include "soilml/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "soilml/errors.hpp"

namespace soilml::csv {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw ValidationError("format_double: to_chars failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view field) {
  std::size_t b = 0, e = field.size();
  while (b < e && (field[b] == ' ' || field[b] == '\t')) ++b;
  while (e > b && (field[e - 1] == ' ' || field[e - 1] == '\t')) --e;
  if (b == e) throw ValidationError("empty numeric field");
  std::string_view core = field.substr(b, e - b);
  double out = 0.0;
  // from_chars does not accept a leading '+'; tolerate one here.
  if (core.front() == '+') core.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(core.data(), core.data() + core.size(), out);
  if (ec != std::errc{} || ptr != core.data() + core.size())
    throw ValidationError("bad numeric field '" + std::string(field) + "'");
  return out;
}

std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

Table parse(std::string_view text, const std::string& name, bool has_header) {
  Table t;
  std::size_t line_no = 0;
  std::size_t want = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fields = split(line);
    if (want == 0) {
      want = fields.size();
    } else if (fields.size() != want) {
      throw ParseError(name, line_no,
                       "expected " + std::to_string(want) + " fields, got " +
                           std::to_string(fields.size()));
    }
    if (has_header && t.header.empty() && t.rows.empty()) {
      t.header = std::move(fields);
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  if (has_header && t.header.empty())
    throw ParseError(name, 0, "missing header row");
  return t;
}

Table read_file(const std::string& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path, has_header);
}

namespace {

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_keyvalue(
    std::string_view text, const std::string& name) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(name, line_no, "expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(name, line_no, "empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_keyvalue_file(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_keyvalue(ss.str(), path);
}

std::string to_string(const Table& t) {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  };
  if (!t.header.empty()) emit(t.header);
  for (const auto& row : t.rows) emit(row);
  return out;
}

void write_file(const std::string& path, const Table& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << to_string(t);
  if (!out) throw ValidationError("write failed for " + path);
}

}  // namespace soilml::csv
