#include "table.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

namespace spdcopt::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

std::size_t Column::size() const {
  return std::visit([](const auto& v) { return v.size(); }, values);
}

void Table::add(std::string name, std::string unit, std::vector<double> values) {
  columns.push_back({std::move(name), std::move(unit), std::move(values)});
}

void Table::add_text(std::string name, std::vector<std::string> values) {
  columns.push_back({std::move(name), "", std::move(values)});
}

std::string Table::to_csv() const {
  std::string out;
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != rows) throw std::logic_error("table columns differ in length");
    if (c) out += ',';
    out += columns[c].name;
    if (!columns[c].unit.empty()) out += " [" + columns[c].unit + "]";
  }
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      if (const auto* num = std::get_if<std::vector<double>>(&columns[c].values))
        out += format_number((*num)[r]);
      else
        out += std::get<std::vector<std::string>>(columns[c].values)[r];
    }
    out += '\n';
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

} // namespace

void write_outputs(const std::filesystem::path& dir, const std::string& stem, const Table& table,
                   const Json& config, const Json& provenance) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  write_file(dir / (stem + ".csv"), table.to_csv());

  Json sidecar = config;
  Json prov = provenance;
  prov["tool"] = "spdcopt";
  prov["version"] = SPDCOPT_VERSION;
  prov["notes"] = default_config()["provenance"]["notes"];
  Json columns = Json::array();
  for (const auto& c : table.columns) columns.push_back(Json{{"name", c.name}, {"unit", c.unit}});
  prov["columns"] = columns;
  sidecar["provenance"] = prov;
  write_file(dir / (stem + ".json"), sidecar.dump(2) + "\n");
}

} // namespace spdcopt::cli
