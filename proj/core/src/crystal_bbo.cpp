#include "spdcopt/crystal_bbo.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "spdcopt/constants.hpp"
#include "spdcopt/errors.hpp"

namespace spdcopt {
namespace {

constexpr double sq(double x) { return x * x; }

double wavelength_of(double omega) { return 2.0 * std::numbers::pi * kSpeedOfLight / omega; }

SellmeierCoefficients coefficients_from(const nlohmann::json& j, const char* key) {
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 4)
    throw DomainError(std::string("Sellmeier entry '") + key + "' must hold 4 numbers");
  return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>(),
          arr[3].get<double>()};
}

void check_range(const SellmeierSet& set, double wavelength) {
  if (!(wavelength >= set.min_wavelength && wavelength <= set.max_wavelength))
    throw DomainError("wavelength " + std::to_string(wavelength * 1e9) +
                      " nm outside the Sellmeier validity range of " + set.name);
}

// k_z = sqrt(k^2 - k_x^2) for an ordinary wave.
double longitudinal_wavevector(double omega, double k_x, const SellmeierSet& set) {
  const double k = omega * set.n_o(wavelength_of(omega)) / kSpeedOfLight;
  const double radicand = sq(k) - sq(k_x);
  if (!(radicand >= 0.0)) throw DomainError("transverse wavevector exceeds total: evanescent wave");
  return std::sqrt(radicand);
}

} // namespace

double SellmeierCoefficients::index(double wavelength_um) const noexcept {
  const double l2 = sq(wavelength_um);
  return std::sqrt(a + b / (l2 - c) - d * l2);
}

SellmeierSet SellmeierSet::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("Sellmeier data is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("Sellmeier data must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "name" && key != "form" && key != "validity_range_m" && key != "ordinary" &&
        key != "extraordinary")
      throw DomainError("unknown Sellmeier field '" + key + "'");
  }
  SellmeierSet set;
  try {
    set.name = j.at("name").get<std::string>();
    const auto& range = j.at("validity_range_m");
    if (!range.is_array() || range.size() != 2)
      throw DomainError("validity_range_m must be [min, max]");
    set.min_wavelength = range[0].get<double>();
    set.max_wavelength = range[1].get<double>();
    set.ordinary = coefficients_from(j, "ordinary");
    set.extraordinary = coefficients_from(j, "extraordinary");
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed Sellmeier data: ") + e.what());
  }
  if (!(set.min_wavelength > 0.0 && set.max_wavelength > set.min_wavelength))
    throw DomainError("Sellmeier validity range must be positive and increasing");
  // Spot-check the ordering at the ends and centre of the range.
  for (double t : {0.0, 0.5, 1.0}) {
    const double lambda = set.min_wavelength + t * (set.max_wavelength - set.min_wavelength);
    const double no = set.n_o(lambda), ne = set.n_e(lambda);
    if (!(ne > 1.0 && no > ne))
      throw DomainError("Sellmeier set '" + set.name + "' is not negative uniaxial with n > 1");
  }
  return set;
}

SellmeierSet SellmeierSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open Sellmeier data file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

double SellmeierSet::n_o(double wavelength) const {
  check_range(*this, wavelength);
  return ordinary.index(wavelength * 1e6);
}

double SellmeierSet::n_e(double wavelength) const {
  check_range(*this, wavelength);
  return extraordinary.index(wavelength * 1e6);
}

const SellmeierSet& bbo_dmitriev() {
  static const SellmeierSet set{
      "BBO (Dmitriev, Gurzadyan, Nikogosyan handbook)",
      2.2e-7,
      1.7e-6,
      {2.7359, 0.01878, 0.01822, 0.01354},
      {2.3753, 0.01224, 0.01667, 0.01516},
  };
  return set;
}

double refractive_index_o(double wavelength, const SellmeierSet& set) { return set.n_o(wavelength); }

double refractive_index_e(double wavelength, const SellmeierSet& set) { return set.n_e(wavelength); }

double refractive_index_pump(double omega, double theta, const SellmeierSet& set) {
  if (!(omega > 0.0)) throw DomainError("angular frequency must be positive");
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2))
    throw DomainError("pump angle must lie in [0, pi/2]");
  const double lambda = wavelength_of(omega);
  const double no = set.n_o(lambda);
  const double ne = set.n_e(lambda);
  if (theta == std::numbers::pi / 2) return ne;
  const double t2 = sq(std::tan(theta));
  return no * std::sqrt((1.0 + t2) / (1.0 + sq(no / ne) * t2));
}

double phase_mismatch(double omega_s, double omega_i, double k_sx, double k_ix, double theta,
                      const SellmeierSet& set) {
  if (!(omega_s > 0.0 && omega_i > 0.0)) throw DomainError("frequencies must be positive");
  const double omega_p = omega_s + omega_i;
  const double k_p = omega_p * refractive_index_pump(omega_p, theta, set) / kSpeedOfLight;
  return k_p - longitudinal_wavevector(omega_s, k_sx, set) -
         longitudinal_wavevector(omega_i, k_ix, set);
}

void validate(const CrystalSpec& spec) {
  if (!(spec.length > 0.0) || !std::isfinite(spec.length))
    throw DomainError("crystal length must be positive");
  if (!(spec.mode_width > 0.0) || !std::isfinite(spec.mode_width))
    throw DomainError("collected mode width must be positive");
  if (!(spec.emission_angle >= 0.0 && spec.emission_angle < std::numbers::pi / 2))
    throw DomainError("emission angle must lie in [0, pi/2)");
  if (!(spec.pump_wavelength > 0.0))
    throw DomainError("pump wavelength must be positive");
  if (std::abs(spec.signal_wavelength - 2.0 * spec.pump_wavelength) > 1e-12 * spec.signal_wavelength)
    throw DomainError("only degenerate down-conversion is supported: signal must be twice the pump wavelength");
}

double signal_wavenumber(const CrystalSpec& spec, const SellmeierSet& set) {
  validate(spec);
  const double omega_s = 2.0 * std::numbers::pi * kSpeedOfLight / spec.signal_wavelength;
  return omega_s * set.n_o(spec.signal_wavelength) / kSpeedOfLight;
}

double signal_transverse_wavevector(const CrystalSpec& spec, const SellmeierSet& set) {
  return signal_wavenumber(spec, set) * std::sin(spec.emission_angle);
}

double phase_matching_angle(const CrystalSpec& spec, const SellmeierSet& set) {
  validate(spec);
  const double omega_s = 2.0 * std::numbers::pi * kSpeedOfLight / spec.signal_wavelength;
  const double k_sx = signal_transverse_wavevector(spec, set);
  auto mismatch = [&](double theta) {
    return phase_mismatch(omega_s, omega_s, k_sx, -k_sx, theta, set);
  };
  constexpr double kTolerance = 1e-3; // 1/m, acceptance check on the final angle
  double lo = 0.0;
  double hi = std::numbers::pi / 2;
  double g_lo = mismatch(lo);
  double g_hi = mismatch(hi);
  if (std::signbit(g_lo) == std::signbit(g_hi))
    throw DomainError("not phase-matchable: the mismatch keeps one sign for theta in (0, pi/2)");
  // Bisect to the resolution of double, not merely to the tolerance.
  for (int i = 0; i < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon(); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g = mismatch(mid);
    if (g == 0.0) return mid;
    if (std::signbit(g) == std::signbit(g_lo)) {
      lo = mid;
      g_lo = g;
    } else {
      hi = mid;
      g_hi = g;
    }
  }
  const double theta = std::abs(g_lo) <= std::abs(g_hi) ? lo : hi;
  const double residual = std::min(std::abs(g_lo), std::abs(g_hi));
  if (!(residual < kTolerance))
    throw ConvergenceError("phase-matching angle did not reach the mismatch tolerance", theta, residual);
  return theta;
}

SigmaEstimate effective_sigma_details(const CrystalSpec& spec, const SigmaOptions& options,
                                      const SellmeierSet& set) {
  validate(spec);
  if (!(options.rel_step > 0.0 && options.rel_step < 1e-2))
    throw DomainError("finite-difference step must lie in (0, 1e-2)");
  SigmaEstimate out;
  out.theta = phase_matching_angle(spec, set);
  const double omega_s = 2.0 * std::numbers::pi * kSpeedOfLight / spec.signal_wavelength;
  const double k_s = signal_wavenumber(spec, set);
  const double k_sx = k_s * std::sin(spec.emission_angle);
  auto mismatch = [&](double ws, double wi, double kx) {
    return phase_mismatch(ws, wi, kx, -k_sx, out.theta, set);
  };

  const double hk = options.rel_step * k_s;
  out.delta_k = (mismatch(omega_s, omega_s, k_sx + hk) - mismatch(omega_s, omega_s, k_sx - hk)) /
                (2.0 * hk);

  const double hw = options.rel_step * omega_s;
  if (options.mode == DetuningMode::SignalOnly) {
    out.delta_omega = (mismatch(omega_s + hw, omega_s, k_sx) - mismatch(omega_s - hw, omega_s, k_sx)) /
                      (2.0 * hw);
  } else {
    out.delta_omega = (mismatch(omega_s + hw, omega_s - hw, k_sx) -
                       mismatch(omega_s - hw, omega_s + hw, k_sx)) /
                      (2.0 * hw);
  }
  // Compare against the inverse phase velocity, the natural scale of d(k)/d(omega).
  const double scale = k_s / omega_s;
  if (!(std::abs(out.delta_omega) > 1e-9 * scale))
    throw DomainError("sigma estimate singular: the mismatch is stationary in frequency");

  out.sigma = std::sqrt((sq(out.delta_k / spec.mode_width) + 5.0 / sq(spec.length)) /
                        sq(out.delta_omega));
  return out;
}

double effective_sigma(const CrystalSpec& spec, const SigmaOptions& options,
                       const SellmeierSet& set) {
  return effective_sigma_details(spec, options, set).sigma;
}

} // namespace spdcopt
