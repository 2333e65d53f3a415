#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace spdcopt::cli {
namespace {

constexpr const char* kDefaultConfig = R"json({
  "source": {
    "tau_p": {"value": 1, "unit": "ns"},
    "sigma": {"value": 1, "unit": "THz"}
  },
  "channel_a": {
    "length": {"value": 1, "unit": "km"},
    "beta": {"value": -1.15e-26, "unit": "s^2/m"},
    "alpha": {"value": 0.2, "unit": "dB/km"}
  },
  "channel_b": {
    "length": {"value": 1, "unit": "km"},
    "beta": {"value": -1.15e-26, "unit": "s^2/m"},
    "alpha": {"value": 0.2, "unit": "dB/km"}
  },
  "detector_a": {
    "jitter": {"value": 0, "unit": "ps"},
    "dark_rate": {"value": 1, "unit": "kHz"},
    "window_factor": 6
  },
  "detector_b": {
    "jitter": {"value": 0, "unit": "ps"},
    "dark_rate": {"value": 1, "unit": "kHz"},
    "window_factor": 6
  },
  "crystal": {
    "length": {"value": 10, "unit": "mm"},
    "mode_width": {"value": 100, "unit": "um"},
    "emission_angle": {"value": 0, "unit": "deg"},
    "pump_wavelength": {"value": 775, "unit": "nm"},
    "detuning_mode": "signal-only",
    "finite_difference_step": 1e-6,
    "sellmeier_file": ""
  },
  "optimize": {
    "full_2d": true
  },
  "qkd": {
    "source_policy": "fixed",
    "optimize_windows": true,
    "varied_arm": "symmetric",
    "other_length": {"value": 0, "unit": "km"},
    "tolerance": {"value": 1, "unit": "m"},
    "pair_rate": {"value": 0, "unit": "Hz"}
  },
  "figure": {
    "curve_points": 241,
    "map_points": 121
  },
  "verify": {
    "suites": ["oracle", "classification", "montecarlo"],
    "oracle_points": 100,
    "grid_points": 1024,
    "classification_samples": 200,
    "mc_scenarios": 10,
    "mc_trials": 10000000,
    "seed": 20240917,
    "perturb_tau_ah": 0
  },
  "provenance": {
    "notes": [
      "beta: standard single-mode fiber at 1550 nm, 18 ps/(nm km); beta is half the group-velocity dispersion",
      "alpha: typical single-mode fiber attenuation",
      "dark_rate: 1 kHz per detector"
    ]
  }
})json";

const std::map<std::string, std::string>& dimensions() {
  static const std::map<std::string, std::string> dims = {
      {"source.tau_p", "time"},
      {"source.sigma", "rate"},
      {"channel_a.length", "length"},
      {"channel_a.beta", "dispersion"},
      {"channel_a.alpha", "attenuation"},
      {"channel_b.length", "length"},
      {"channel_b.beta", "dispersion"},
      {"channel_b.alpha", "attenuation"},
      {"detector_a.jitter", "time"},
      {"detector_a.dark_rate", "rate"},
      {"detector_b.jitter", "time"},
      {"detector_b.dark_rate", "rate"},
      {"crystal.length", "length"},
      {"crystal.mode_width", "length"},
      {"crystal.emission_angle", "angle"},
      {"crystal.pump_wavelength", "length"},
      {"qkd.other_length", "length"},
      {"qkd.tolerance", "length"},
      {"qkd.pair_rate", "rate"},
  };
  return dims;
}

bool is_quantity(const Json& j) {
  return j.is_object() && j.size() == 2 && j.contains("value") && j.contains("unit");
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void check_node(const Json& node, const Json& reference, const std::string& path) {
  if (path == "provenance") return; // free-form, ignored on input
  if (is_quantity(reference)) {
    if (!node.is_object() || !node.contains("value") || !node.contains("unit") || node.size() != 2)
      throw ConfigError(path + ": expected {\"value\": number, \"unit\": string}");
    if (!node["value"].is_number()) throw ConfigError(path + ".value must be a number");
    if (!node["unit"].is_string()) throw ConfigError(path + ".unit must be a string");
    unit_factor(node["unit"].get<std::string>(), dimensions().at(path));
    if (!std::isfinite(node["value"].get<double>())) throw ConfigError(path + ".value must be finite");
    return;
  }
  if (reference.is_object()) {
    if (!node.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& [key, value] : node.items()) {
      if (!reference.contains(key)) throw ConfigError("unknown field '" + join(path, key) + "'");
      check_node(value, reference[key], join(path, key));
    }
    return;
  }
  if (reference.is_boolean() && !node.is_boolean()) throw ConfigError(path + " must be true or false");
  if (reference.is_number() && !node.is_number()) throw ConfigError(path + " must be a number");
  if (reference.is_string() && !node.is_string()) throw ConfigError(path + " must be a string");
  if (reference.is_array()) {
    if (!node.is_array()) throw ConfigError(path + " must be an array");
    for (const auto& v : node)
      if (!v.is_string()) throw ConfigError(path + " must hold strings");
  }
}

void merge(Json& target, const Json& patch) {
  for (const auto& [key, value] : patch.items()) {
    if (value.is_object() && target.contains(key) && target[key].is_object() && !is_quantity(value))
      merge(target[key], value);
    else
      target[key] = value;
  }
}

// "100 GHz" or "100GHz" -> {"value": 100, "unit": "GHz"}.
bool parse_quantity_text(const std::string& text, Json& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr == first) return false;
  std::string unit(ptr, last);
  unit.erase(0, unit.find_first_not_of(' '));
  if (unit.empty()) return false;
  out = Json{{"value", v}, {"unit", unit}};
  return true;
}

Json parse_override_value(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error&) {
  }
  Json q;
  if (parse_quantity_text(text, q)) return q;
  return Json(text);
}

const Json& at_path(const Json& config, const std::string& path) {
  const Json* node = &config;
  std::istringstream in(path);
  for (std::string key; std::getline(in, key, '.');) {
    if (!node->is_object() || !node->contains(key)) throw ConfigError("missing field '" + path + "'");
    node = &(*node)[key];
  }
  return *node;
}

std::string string_at(const Json& config, const std::string& path) {
  return at_path(config, path).get<std::string>();
}

DetectorParams detector_of(const Json& config, const std::string& arm) {
  return {quantity(config, arm + ".jitter"), quantity(config, arm + ".dark_rate"),
          at_path(config, arm + ".window_factor").get<double>()};
}

ChannelParams channel_of(const Json& config, const std::string& arm) {
  // Attenuation is stored per km; the unit factor maps dB/km onto itself.
  return {quantity(config, arm + ".length"), quantity(config, arm + ".beta"),
          quantity(config, arm + ".alpha")};
}

} // namespace

const Json& default_config() {
  static const Json config = Json::parse(kDefaultConfig);
  return config;
}

double unit_factor(const std::string& unit, const std::string& dimension) {
  struct Unit {
    const char* name;
    const char* dimension;
    double factor;
  };
  static const Unit units[] = {
      {"s", "time", 1.0},          {"ns", "time", 1e-9},
      {"ps", "time", 1e-12},       {"fs", "time", 1e-15},
      {"m", "length", 1.0},        {"km", "length", 1e3},
      {"mm", "length", 1e-3},      {"um", "length", 1e-6},
      {"nm", "length", 1e-9},      {"Hz", "rate", 1.0},
      {"kHz", "rate", 1e3},        {"GHz", "rate", 1e9},
      {"THz", "rate", 1e12},       {"s^-1", "rate", 1.0},
      {"dB/km", "attenuation", 1.0},
      {"s^2/m", "dispersion", 1.0}, {"s²/m", "dispersion", 1.0},
      {"deg", "angle", std::numbers::pi / 180.0},
      {"rad", "angle", 1.0},
  };
  for (const auto& u : units) {
    if (unit == u.name) {
      if (dimension != u.dimension)
        throw ConfigError("unit '" + unit + "' is a " + u.dimension + " unit, expected " + dimension);
      return u.factor;
    }
  }
  throw ConfigError("unit '" + unit + "' is not accepted");
}

void check_schema(const Json& config) { check_node(config, default_config(), ""); }

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  const std::string path = assignment.substr(0, eq);
  Json value = parse_override_value(assignment.substr(eq + 1));

  Json* node = &config;
  std::istringstream in(path);
  std::vector<std::string> keys;
  for (std::string key; std::getline(in, key, '.');) keys.push_back(key);
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    if (!node->is_object()) throw ConfigError("override path '" + path + "' crosses a non-object");
    node = &(*node)[keys[i]];
  }
  if (!node->is_object()) throw ConfigError("override path '" + path + "' crosses a non-object");
  // Numbers given for a numeric leaf inside a quantity stay numbers; a
  // quantity given as text replaces the whole {value, unit} pair.
  (*node)[keys.back()] = std::move(value);
}

Json load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
  Json config = default_config();
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config file " + file.string());
    Json user;
    try {
      user = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError("config file " + file.string() + " is not valid JSON: " + e.what());
    }
    if (!user.is_object()) throw ConfigError("config file must hold a JSON object");
    check_schema(user);
    merge(config, user);
  }
  for (const auto& o : overrides) apply_override(config, o);
  check_schema(config);
  return config;
}

double quantity(const Json& config, const std::string& path) {
  const Json& q = at_path(config, path);
  if (!is_quantity(q)) throw ConfigError(path + " is not a {value, unit} quantity");
  return q["value"].get<double>() * unit_factor(q["unit"].get<std::string>(), dimensions().at(path));
}

SourceParams source_of(const Json& config) {
  return {quantity(config, "source.tau_p"), quantity(config, "source.sigma")};
}

QkdScenario scenario_of(const Json& config) {
  QkdScenario s{source_of(config), channel_of(config, "channel_a"), channel_of(config, "channel_b"),
                detector_of(config, "detector_a"), detector_of(config, "detector_b")};
  validate(s);
  return s;
}

CrystalSpec crystal_of(const Json& config) {
  CrystalSpec c;
  c.length = quantity(config, "crystal.length");
  c.mode_width = quantity(config, "crystal.mode_width");
  c.emission_angle = quantity(config, "crystal.emission_angle");
  c.pump_wavelength = quantity(config, "crystal.pump_wavelength");
  c.signal_wavelength = 2.0 * c.pump_wavelength;
  return c;
}

SigmaOptions sigma_options_of(const Json& config) {
  SigmaOptions o;
  const std::string mode = string_at(config, "crystal.detuning_mode");
  if (mode == "signal-only")
    o.mode = DetuningMode::SignalOnly;
  else if (mode == "anti-correlated")
    o.mode = DetuningMode::AntiCorrelated;
  else
    throw ConfigError("crystal.detuning_mode must be 'signal-only' or 'anti-correlated'");
  o.rel_step = at_path(config, "crystal.finite_difference_step").get<double>();
  return o;
}

SellmeierSet sellmeier_of(const Json& config) {
  const std::string file = string_at(config, "crystal.sellmeier_file");
  if (file.empty()) return bbo_dmitriev();
  return SellmeierSet::load(file);
}

LinkTemplate link_template_of(const Json& config) {
  const QkdScenario s = scenario_of(config);
  if (s.channel_a.beta != s.channel_b.beta || s.channel_a.alpha_db_per_km != s.channel_b.alpha_db_per_km)
    throw ConfigError("distance searches need identical fiber in both arms");
  LinkTemplate t;
  t.source = s.source;
  t.beta = s.channel_a.beta;
  t.alpha_db_per_km = s.channel_a.alpha_db_per_km;
  t.detector_a = s.detector_a;
  t.detector_b = s.detector_b;
  const std::string policy = string_at(config, "qkd.source_policy");
  if (policy == "fixed")
    t.policy = SourcePolicy::Fixed;
  else if (policy == "pump-matched")
    t.policy = SourcePolicy::PumpMatched;
  else if (policy == "fully-matched")
    t.policy = SourcePolicy::FullyMatched;
  else if (policy == "pump-optimized")
    t.policy = SourcePolicy::PumpOptimized;
  else
    throw ConfigError("qkd.source_policy must be fixed, pump-matched, fully-matched or pump-optimized");
  return t;
}

} // namespace spdcopt::cli
