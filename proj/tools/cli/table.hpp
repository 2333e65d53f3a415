#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"

namespace spdcopt::cli {

/// Shortest decimal that parses back to the same double.
std::string format_number(double v);

struct Column {
  std::string name;
  std::string unit; ///< empty for dimensionless or text columns
  std::variant<std::vector<double>, std::vector<std::string>> values;

  std::size_t size() const;
};

struct Table {
  std::vector<Column> columns;

  void add(std::string name, std::string unit, std::vector<double> values);
  void add_text(std::string name, std::vector<std::string> values);
  std::string to_csv() const;
};

/// Write `<dir>/<stem>.csv` and the `<dir>/<stem>.json` sidecar. The sidecar
/// is the effective configuration plus a provenance block, so it can be fed
/// back with --config.
void write_outputs(const std::filesystem::path& dir, const std::string& stem, const Table& table,
                   const Json& config, const Json& provenance);

} // namespace spdcopt::cli
