#include "csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace bolasso::csv {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

bool needs_quoting(const std::string& cell, char delimiter) {
  return cell.find(delimiter) != std::string::npos || cell.find('"') != std::string::npos ||
         cell.find('\n') != std::string::npos;
}

void append_cell(std::string& out, const std::string& cell, char delimiter) {
  if (!needs_quoting(cell, delimiter)) {
    out += cell;
    return;
  }
  out += '"';
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line, char delimiter, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("csv: unterminated quote on line " + std::to_string(line_no));
  cells.push_back(trim(cur));
  return cells;
}

}  // namespace

std::string to_string(const Table& table, char delimiter) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += delimiter;
    append_cell(out, table.header[i], delimiter);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += delimiter;
      append_cell(out, row[i], delimiter);
    }
    out += '\n';
  }
  return out;
}

void write_file(const Table& table, const std::string& path, char delimiter) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("csv: cannot open " + path + " for writing");
  f << to_string(table, delimiter);
  if (!f) throw IoError("csv: write to " + path + " failed");
}

RawTable read_file(const std::string& path, char delimiter) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("csv: cannot open " + path);
  RawTable out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && out.header.empty()) continue;
    auto cells = split_line(line, delimiter, line_no);
    if (out.header.empty()) {
      out.header = std::move(cells);
      continue;
    }
    if (cells.size() == 1 && cells[0].empty()) continue;  // blank trailing line
    if (cells.size() != out.header.size()) {
      throw ParseError("csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(out.header.size()));
    }
    out.rows.push_back(std::move(cells));
  }
  if (out.header.empty()) throw ParseError("csv: " + path + " is empty");
  return out;
}

bool is_missing(const std::string& cell) {
  if (cell.empty()) return true;
  std::string low = cell;
  std::transform(low.begin(), low.end(), low.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return low == "na" || low == "nan" || low == "null" || low == "?";
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;  // from_chars rejects an explicit plus
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

}  // namespace bolasso::csv
