#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

// Phase-matching width estimate for degenerate type-I SPDC in a negative
// uniaxial crystal (extraordinary pump, ordinary signal and idler).

namespace spdcopt {

/// Sellmeier dispersion n^2 = a + b / (lambda^2 - c) - d lambda^2 with
/// lambda in micrometres.
struct SellmeierCoefficients {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  double index(double wavelength_um) const noexcept;
};

struct SellmeierSet {
  std::string name;
  double min_wavelength = 0.0; ///< m
  double max_wavelength = 0.0; ///< m
  SellmeierCoefficients ordinary;
  SellmeierCoefficients extraordinary;

  /// Parse the JSON layout of data/bbo_dmitriev.json. Throws DomainError on
  /// malformed input, unknown keys, or a set that is not negative uniaxial.
  static SellmeierSet from_json(std::string_view text);
  static SellmeierSet load(const std::filesystem::path& path);

  double n_o(double wavelength) const;
  double n_e(double wavelength) const;
};

/// Built-in BBO coefficients, identical to data/bbo_dmitriev.json.
const SellmeierSet& bbo_dmitriev();

double refractive_index_o(double wavelength, const SellmeierSet& set = bbo_dmitriev());
double refractive_index_e(double wavelength, const SellmeierSet& set = bbo_dmitriev());

/// Extraordinary index seen by a pump at angular frequency omega whose
/// propagation makes angle theta with the optic axis.
double refractive_index_pump(double omega, double theta,
                             const SellmeierSet& set = bbo_dmitriev());

/// Longitudinal phase mismatch of the pump and the signal/idler pair, 1/m.
double phase_mismatch(double omega_s, double omega_i, double k_sx, double k_ix, double theta,
                      const SellmeierSet& set = bbo_dmitriev());

struct CrystalSpec {
  double length = 0.0;         ///< m
  double mode_width = 0.0;     ///< m, collected transverse mode width
  double emission_angle = 0.0; ///< rad, internal angle between pump and signal
  double pump_wavelength = 775e-9;
  double signal_wavelength = 1550e-9;
};

void validate(const CrystalSpec& spec);

/// Signal wavevector magnitude and its transverse component k_s sin(alpha).
double signal_wavenumber(const CrystalSpec& spec, const SellmeierSet& set = bbo_dmitriev());
double signal_transverse_wavevector(const CrystalSpec& spec,
                                    const SellmeierSet& set = bbo_dmitriev());

/// Cut angle theta in (0, pi/2) that zeroes the mismatch at the central
/// configuration. Throws DomainError when no such angle exists.
double phase_matching_angle(const CrystalSpec& spec, const SellmeierSet& set = bbo_dmitriev());

enum class DetuningMode {
  SignalOnly,     ///< derivative in omega_s at fixed omega_i
  AntiCorrelated, ///< omega_s + nu, omega_i - nu (singular at degeneracy)
};

struct SigmaOptions {
  DetuningMode mode = DetuningMode::SignalOnly;
  double rel_step = 1e-6;
};

struct SigmaEstimate {
  double sigma = 0.0;       ///< s^-1
  double theta = 0.0;       ///< rad
  double delta_k = 0.0;     ///< d(dk_z)/d(k_sx), dimensionless
  double delta_omega = 0.0; ///< d(dk_z)/d(omega), s/m
};

SigmaEstimate effective_sigma_details(const CrystalSpec& spec, const SigmaOptions& options = {},
                                      const SellmeierSet& set = bbo_dmitriev());

double effective_sigma(const CrystalSpec& spec, const SigmaOptions& options = {},
                       const SellmeierSet& set = bbo_dmitriev());

} // namespace spdcopt
