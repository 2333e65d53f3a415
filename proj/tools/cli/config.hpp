#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include <spdcopt/crystal_bbo.hpp>
#include <spdcopt/qkd_security.hpp>

namespace spdcopt::cli {

using Json = nlohmann::json;

/// Malformed configuration: bad JSON, unknown field, unit not accepted.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Output file could not be written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Built-in scenario; every accepted key appears in it.
const Json& default_config();

/// Default, merged with the file (if any), then with dotted overrides.
Json load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides);

/// Apply one `a.b.c=value` override in place.
void apply_override(Json& config, const std::string& assignment);

/// Reject keys absent from the default document and mistyped values.
void check_schema(const Json& config);

/// SI value of a {value, unit} quantity at a dotted path.
double quantity(const Json& config, const std::string& path);

/// SI factor for a unit; throws ConfigError for units outside the accepted set
/// or of the wrong dimension.
double unit_factor(const std::string& unit, const std::string& dimension);

SourceParams source_of(const Json& config);
QkdScenario scenario_of(const Json& config);
CrystalSpec crystal_of(const Json& config);
SigmaOptions sigma_options_of(const Json& config);
SellmeierSet sellmeier_of(const Json& config);
LinkTemplate link_template_of(const Json& config);

} // namespace spdcopt::cli
