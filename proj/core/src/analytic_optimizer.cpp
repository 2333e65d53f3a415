#include "spdcopt/analytic_optimizer.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "spdcopt/errors.hpp"
#include "spdcopt/temporal_model.hpp"

namespace spdcopt {
namespace {

constexpr double sq(double x) { return x * x; }

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw DomainError("sigma must be positive, got " + std::to_string(sigma));
}

void require_nonzero(double d, const char* name) {
  if (d == 0.0 || !std::isfinite(d))
    throw DomainError(std::string(name) +
                      " must be finite and nonzero; the width is monotone in tau_p "
                      "without dispersion");
}

void require_negative(double d, const char* name) {
  if (!(d < 0.0) || !std::isfinite(d))
    throw DomainError(std::string(name) +
                      " must be negative; the pump classification covers "
                      "normal-dispersion (SMF-like) channels only");
}

std::optional<double> real_sqrt(double radicand) {
  if (!(radicand >= 0.0)) return std::nullopt;
  return std::sqrt(radicand);
}

} // namespace

std::string_view to_string(PumpRegime regime) noexcept {
  switch (regime) {
  case PumpRegime::InteriorMinimum: return "interior-minimum";
  case PumpRegime::InfimumAtZero: return "infimum-at-zero";
  case PumpRegime::InfimumAtInfinity: return "infimum-at-infinity";
  }
  return "unknown";
}

double strong_asymmetry_ratio() noexcept { return 4.0 * std::numbers::sqrt2 + 5.0; }

double weak_asymmetry_ratio() noexcept { return (4.0 * std::numbers::sqrt2 - 5.0) / 7.0; }

UnheraldedOptimum tau_a_low(double d_a, double sigma) {
  require_nonzero(d_a, "d_a");
  require_sigma(sigma);
  const double abs_d = std::abs(d_a);
  return {std::sqrt(2.0 * abs_d), (2.0 + abs_d * sq(sigma)) / (2.0 * sigma)};
}

SymmetricOptimum symmetric_full_optimum(double d) {
  require_nonzero(d, "d");
  const double abs_d = std::abs(d);
  const double width = std::sqrt(2.0 * abs_d);
  return {width, std::sqrt(2.0 / abs_d), width};
}

double tau_ah_low_sym(double d, double sigma) {
  require_nonzero(d, "d");
  require_sigma(sigma);
  const double abs_d = std::abs(d);
  const double s2 = sq(sigma);
  return std::sqrt(4.0 * abs_d * (sq(d) * sq(s2) + 4.0) / sq(abs_d * s2 + 2.0));
}

CaseBoundaries case_boundaries(double d_a, double d_b) {
  require_negative(d_a, "d_a");
  require_negative(d_b, "d_b");
  CaseBoundaries out;
  const double diff = d_a - d_b;

  // Exactly on a case threshold the discriminant vanishes; rounding may
  // leave it a few ulps negative.
  const double round_off = 64.0 * std::numeric_limits<double>::epsilon() * (sq(diff) + sq(d_a + d_b));
  auto settle = [&](double disc) { return (disc < 0.0 && disc > -round_off) ? 0.0 : disc; };

  const double disc_zero = settle(sq(diff) - 8.0 * d_a * (d_a + d_b));
  if (disc_zero >= 0.0) {
    const double root = std::sqrt(disc_zero);
    const double scale = 2.0 * d_a * d_b;
    out.xi_plus_minus = real_sqrt((diff - root) / scale);
    out.xi_plus_plus = real_sqrt((diff + root) / scale);
  }

  const double disc_inf = settle(sq(diff) - 8.0 * d_b * (d_a + d_b));
  if (disc_inf >= 0.0) {
    const double root = std::sqrt(disc_inf);
    const double scale = d_b * (d_a + d_b);
    out.zeta_minus_plus = real_sqrt(-(diff + root) / scale);
    out.zeta_minus_minus = real_sqrt(-(diff - root) / scale);
  }
  return out;
}

double heralded_width_limit_short_pump(double d_a, double d_b, double sigma) {
  require_sigma(sigma);
  require_nonzero(d_b, "d_b");
  const double s2 = sq(sigma);
  return std::sqrt((sq(d_a * d_b) * sq(s2) + sq(d_a + d_b)) / (sq(d_b) * s2));
}

double heralded_width_limit_long_pump(double d_a, double d_b, double sigma) {
  require_sigma(sigma);
  const double s2 = sq(sigma);
  return std::sqrt((16.0 + sq(d_a + d_b) * sq(s2)) / (4.0 * s2));
}

PumpOptimum optimal_pump_fixed_crystal(double d_a, double d_b, double sigma) {
  require_negative(d_a, "d_a");
  require_negative(d_b, "d_b");
  require_sigma(sigma);

  const double upper = strong_asymmetry_ratio() * d_a;
  const double lower = weak_asymmetry_ratio() * d_a;

  // Ties on any boundary go to the no-interior-minimum branch.
  PumpRegime kind = PumpRegime::InteriorMinimum;
  if (upper < d_b && d_b < lower) {
    kind = PumpRegime::InteriorMinimum;
  } else if (d_b <= upper) {
    const CaseBoundaries b = case_boundaries(d_a, d_b);
    if (!b.xi_plus_minus || !b.xi_plus_plus)
      throw ConsistencyError("strongly asymmetric channels must have real zero-regime bounds");
    const bool outside = sigma < *b.xi_plus_minus || sigma > *b.xi_plus_plus;
    kind = outside ? PumpRegime::InteriorMinimum : PumpRegime::InfimumAtZero;
  } else {
    const CaseBoundaries b = case_boundaries(d_a, d_b);
    if (!b.zeta_minus_plus || !b.zeta_minus_minus)
      throw ConsistencyError("weak heralding dispersion must have real infinity-regime bounds");
    const bool outside = sigma < *b.zeta_minus_plus || sigma > *b.zeta_minus_minus;
    kind = outside ? PumpRegime::InteriorMinimum : PumpRegime::InfimumAtInfinity;
  }

  PumpOptimum out;
  out.kind = kind;
  switch (kind) {
  case PumpRegime::InfimumAtZero:
    out.tau_ah_at_optimum = heralded_width_limit_short_pump(d_a, d_b, sigma);
    return out;
  case PumpRegime::InfimumAtInfinity:
    out.tau_ah_at_optimum = heralded_width_limit_long_pump(d_a, d_b, sigma);
    return out;
  case PumpRegime::InteriorMinimum:
    break;
  }

  const double s2 = sq(sigma);
  const double s4 = sq(s2);
  const double numerator = 2.0 * (d_a + d_b) - s2 * d_b * (d_a - d_b) + s4 * d_a * sq(d_b);
  const double denominator = 8.0 + 2.0 * s2 * (d_a - d_b) + s4 * d_b * (d_a + d_b);
  const double ratio = -numerator / denominator;
  if (!(ratio > 0.0) || !std::isfinite(ratio))
    throw ConsistencyError("optimal pump duration is not real in a regime classified as "
                           "having an interior minimum");
  const double tau_p = 2.0 * std::sqrt(ratio);
  out.tau_p_star = tau_p;
  out.tau_ah_at_optimum = tau_heralded(SourceParams{tau_p, sigma}, d_a, d_b);
  return out;
}

} // namespace spdcopt
