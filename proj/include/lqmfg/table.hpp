#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lqmfg {

using Cell = std::variant<double, std::int64_t, std::string>;

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);
std::string format_cell(const Cell& cell);

/// A tagged table of results plus the metadata needed to regenerate it.
struct ExperimentTable {
  std::string id;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_row(std::vector<Cell> row);
  void set_meta(const std::string& key, const std::string& value);
  const std::string* meta(const std::string& key) const;
  /// Numeric value of a cell (ints widen, strings "inf" map to infinity).
  double number(std::size_t row, std::size_t column) const;
  std::size_t column_index(const std::string& name) const;
};

/// Writes `table` as CSV with a single header row. Throws IoError.
void write_csv(const std::filesystem::path& path, const ExperimentTable& table);
std::string to_csv(const ExperimentTable& table);

/// Writes `content` to `path` verbatim. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& content);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace lqmfg
