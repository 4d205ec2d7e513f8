#pragma once

#include <string>
#include <vector>

#include "types.hpp"

namespace bolasso::csv {

/// Shortest decimal string that round-trips to the same double ('.' decimal
/// separator, locale independent).
std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string to_string(const Table& table, char delimiter = ',');
void write_file(const Table& table, const std::string& path, char delimiter = ',');

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Splits a delimited file into trimmed cells; every row must have the same
/// number of cells as the header. Double quotes wrap cells containing the
/// delimiter.
RawTable read_file(const std::string& path, char delimiter = ',');

/// True for empty cells and the usual missing-value markers (NA, NaN, ?).
bool is_missing(const std::string& cell);

/// Parses a full cell as a double; returns false when the cell is not
/// numeric.
bool parse_double(const std::string& cell, double& out);

}  // namespace bolasso::csv
