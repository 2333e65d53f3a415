#pragma once

// Closed-form arrival-time widths of SPDC photons after dispersive fiber
// channels. Everything here is SI: seconds, meters, s^-1.

namespace spdcopt {

/// Photon-pair source: pump pulse duration and effective phase-matching width.
struct SourceParams {
  double tau_p = 0.0; ///< s
  double sigma = 0.0; ///< s^-1, angular detuning width
};

/// Fiber channel between the source and one detector.
struct ChannelParams {
  double length = 0.0;          ///< m
  double beta = 0.0;            ///< s^2/m, half the GVD coefficient
  double alpha_db_per_km = 0.0; ///< dB/km
};

/// Single-photon detection system at one end of the link.
struct DetectorParams {
  double jitter = 0.0;        ///< s, standard deviation of the response time
  double dark_rate = 0.0;     ///< counts/s
  double window_factor = 1.0; ///< window duration in units of the photon width
};

struct TemporalWidths {
  double tau_unheralded = 0.0;
  double tau_heralded = 0.0;
};

void validate(const SourceParams& source);
void validate(const ChannelParams& channel);
void validate(const DetectorParams& detector);

/// D = beta * L, in s^2.
double accumulated_dispersion(const ChannelParams& channel);

/// Width of photon A when nothing is known about its twin.
double tau_unheralded(const SourceParams& source, double d_a);

/// Width of photon A conditioned on the detection time of photon B.
/// Swapping the dispersion arguments gives the heralded width of photon B.
double tau_heralded(const SourceParams& source, double d_a, double d_b);

/// sqrt(tau_A^2 + jitter_a^2).
double tau_unheralded_jittered(const SourceParams& source, double d_a, double jitter_a);

/// Fraction of the heralding detector's jitter variance that leaks into the
/// heralded width: the squared regression slope of t_A on t_B. Below 1 when
/// |d_a| <= |d_b|; it can exceed 1 when the heralded arm is far more dispersive.
double heralding_jitter_weight(const SourceParams& source, double d_a, double d_b);

double tau_heralded_jittered(const SourceParams& source, double d_a, double d_b,
                             double jitter_a, double jitter_b);

/// Both widths of photon A, including detector jitter when nonzero.
TemporalWidths widths_of_a(const SourceParams& source, double d_a, double d_b,
                           double jitter_a = 0.0, double jitter_b = 0.0);

/// Spectral width in wavelength (m) of an angular detuning width sigma around
/// `center_wavelength`: lambda^2 sigma / (2 pi c).
double sigma_to_wavelength_width(double sigma, double center_wavelength);
double wavelength_width_to_sigma(double wavelength_width, double center_wavelength);

} // namespace spdcopt
