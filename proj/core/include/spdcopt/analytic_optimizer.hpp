#pragma once

#include <optional>
#include <string_view>

namespace spdcopt {

/// Where the heralded width of photon A attains its infimum over tau_p.
enum class PumpRegime {
  InteriorMinimum,   ///< a finite optimal pump duration exists
  InfimumAtZero,     ///< width increases monotonically with tau_p
  InfimumAtInfinity, ///< width decreases monotonically with tau_p
};

std::string_view to_string(PumpRegime regime) noexcept;

/// Result of optimizing the pump duration for a fixed crystal.
///
/// `tau_ah_at_optimum` is always set: for the asymptotic regimes it holds the
/// limiting width approached as tau_p -> 0 or tau_p -> infinity.
struct PumpOptimum {
  PumpRegime kind = PumpRegime::InteriorMinimum;
  std::optional<double> tau_p_star;
  std::optional<double> tau_ah_at_optimum;
};

/// Phase-matching widths delimiting the asymptotic regimes of the heralded
/// width, for same-sign (negative) dispersions. An entry is absent when its
/// discriminant is negative.
///
/// Strongly asymmetric channels (|D_B| >~ 10.7 |D_A|) have no interior
/// minimum for sigma in [xi_plus_minus, xi_plus_plus]; weakly
/// dispersive heralding arms (|D_B| <~ 0.094 |D_A|) have none for sigma in
/// [zeta_minus_plus, zeta_minus_minus].
struct CaseBoundaries {
  std::optional<double> xi_plus_minus;
  std::optional<double> xi_plus_plus;
  std::optional<double> zeta_minus_plus;
  std::optional<double> zeta_minus_minus;
};

struct UnheraldedOptimum {
  double tau_p_opt = 0.0;
  double tau_a_min = 0.0;
};

struct SymmetricOptimum {
  double tau_p = 0.0;
  double sigma = 0.0;
  double tau_ah = 0.0;
};

/// Dispersion-ratio thresholds separating the three classification cases,
/// 4 sqrt(2) + 5 and (4 sqrt(2) - 5) / 7.
double strong_asymmetry_ratio() noexcept;
double weak_asymmetry_ratio() noexcept;

/// Minimum over tau_p of the unheralded width at fixed sigma.
UnheraldedOptimum tau_a_low(double d_a, double sigma);

/// Joint optimum over (tau_p, sigma) when both arms carry dispersion d.
SymmetricOptimum symmetric_full_optimum(double d);

/// Minimum over tau_p of the heralded width at fixed sigma, symmetric arms.
double tau_ah_low_sym(double d, double sigma);

CaseBoundaries case_boundaries(double d_a, double d_b);

/// Classify and solve the pump-duration optimization of the heralded width
/// of photon A. Both dispersions must be negative.
PumpOptimum optimal_pump_fixed_crystal(double d_a, double d_b, double sigma);

/// Limits of the heralded width as tau_p -> 0 and tau_p -> infinity.
double heralded_width_limit_short_pump(double d_a, double d_b, double sigma);
double heralded_width_limit_long_pump(double d_a, double d_b, double sigma);

} // namespace spdcopt
