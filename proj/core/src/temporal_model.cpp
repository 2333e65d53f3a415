#include "spdcopt/temporal_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spdcopt/constants.hpp"
#include "spdcopt/errors.hpp"

namespace spdcopt {
namespace {

constexpr double sq(double x) { return x * x; }

void require_jitter(double jitter) {
  if (!(jitter >= 0.0) || !std::isfinite(jitter))
    throw DomainError("detector jitter must be finite and non-negative, got " +
                      std::to_string(jitter));
}

void require_dispersion(double d) {
  if (!std::isfinite(d)) throw DomainError("accumulated dispersion must be finite");
}

} // namespace

void validate(const SourceParams& source) {
  if (!(source.tau_p > 0.0) || !std::isfinite(source.tau_p))
    throw DomainError("pump duration tau_p must be positive, got " +
                      std::to_string(source.tau_p));
  if (!(source.sigma > 0.0) || !std::isfinite(source.sigma))
    throw DomainError("phase-matching width sigma must be positive, got " +
                      std::to_string(source.sigma));
}

void validate(const ChannelParams& channel) {
  if (!(channel.length >= 0.0) || !std::isfinite(channel.length))
    throw DomainError("channel length must be non-negative");
  if (!std::isfinite(channel.beta)) throw DomainError("channel beta must be finite");
  if (!(channel.alpha_db_per_km >= 0.0) || !std::isfinite(channel.alpha_db_per_km))
    throw DomainError("channel attenuation must be non-negative");
}

void validate(const DetectorParams& detector) {
  require_jitter(detector.jitter);
  if (!(detector.dark_rate >= 0.0) || !std::isfinite(detector.dark_rate))
    throw DomainError("dark-count rate must be non-negative");
  if (!(detector.window_factor > 0.0) || !std::isfinite(detector.window_factor))
    throw DomainError("detection window factor must be positive");
}

double accumulated_dispersion(const ChannelParams& channel) {
  validate(channel);
  return channel.beta * channel.length;
}

double tau_unheralded(const SourceParams& source, double d_a) {
  validate(source);
  require_dispersion(d_a);
  const double tp2 = sq(source.tau_p);
  const double s2 = sq(source.sigma);
  return std::sqrt((tp2 + sq(d_a) * s2) * (4.0 + s2 * tp2)) /
         (2.0 * source.sigma * source.tau_p);
}

double tau_heralded(const SourceParams& source, double d_a, double d_b) {
  validate(source);
  require_dispersion(d_a);
  require_dispersion(d_b);
  const double tp2 = sq(source.tau_p);
  const double s2 = sq(source.sigma);
  const double coupling = tp2 - d_a * d_b * s2;
  const double bandwidth = s2 * tp2 + 4.0;
  const double numerator = 16.0 * sq(coupling) + sq(d_a + d_b) * sq(bandwidth);
  const double denominator = 4.0 * (tp2 + sq(d_b) * s2) * bandwidth;
  return std::sqrt(numerator / denominator);
}

double tau_unheralded_jittered(const SourceParams& source, double d_a, double jitter_a) {
  require_jitter(jitter_a);
  return std::hypot(tau_unheralded(source, d_a), jitter_a);
}

double heralding_jitter_weight(const SourceParams& source, double d_a, double d_b) {
  validate(source);
  const double tp2 = sq(source.tau_p);
  const double s2 = sq(source.sigma);
  // Written as a squared ratio so that it is exactly zero on either nodal set.
  const double ratio = ((tp2 - d_a * d_b * s2) * (s2 * tp2 - 4.0)) /
                       ((tp2 + sq(d_b) * s2) * (s2 * tp2 + 4.0));
  return sq(ratio);
}

double tau_heralded_jittered(const SourceParams& source, double d_a, double d_b,
                             double jitter_a, double jitter_b) {
  require_jitter(jitter_a);
  require_jitter(jitter_b);
  const double tau_ah = tau_heralded(source, d_a, d_b);
  if (jitter_a == 0.0 && jitter_b == 0.0) return tau_ah;
  const double weight = heralding_jitter_weight(source, d_a, d_b);
  return std::sqrt(sq(tau_ah) + sq(jitter_a) + weight * sq(jitter_b));
}

TemporalWidths widths_of_a(const SourceParams& source, double d_a, double d_b,
                           double jitter_a, double jitter_b) {
  return {tau_unheralded_jittered(source, d_a, jitter_a),
          tau_heralded_jittered(source, d_a, d_b, jitter_a, jitter_b)};
}

double sigma_to_wavelength_width(double sigma, double center_wavelength) {
  if (!(center_wavelength > 0.0)) throw DomainError("center wavelength must be positive");
  return sq(center_wavelength) * sigma / (2.0 * std::numbers::pi * kSpeedOfLight);
}

double wavelength_width_to_sigma(double wavelength_width, double center_wavelength) {
  if (!(center_wavelength > 0.0)) throw DomainError("center wavelength must be positive");
  return wavelength_width * 2.0 * std::numbers::pi * kSpeedOfLight / sq(center_wavelength);
}

} // namespace spdcopt
