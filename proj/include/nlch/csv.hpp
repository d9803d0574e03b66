#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlch/diagnostics.hpp"
#include "nlch/state.hpp"

namespace nlch {

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite.
std::string format_real(double v);

/// Header plus one row per record; flags joined by ';'.
std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records);

/// Columns x[,y],phi,mu,sigma, one row per cell in storage order.
std::string state_csv(const State& s);

/// Reads the column called `name` (or the last column) of a CSV in the
/// state_csv layout. Throws IoError on unreadable files, malformed rows or a
/// row count different from the grid size.
Field read_field_csv(const std::filesystem::path& path, const Grid& grid, const std::string& name);

/// Generic table with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const;
};

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace nlch
