#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spdcopt/temporal_model.hpp"

// Numerical reference for the closed-form widths. The joint spectral
// amplitude is propagated with quadratic spectral phases and Fourier
// transformed to arrival times; widths are then measured from the sampled
// intensity. Nothing here calls the closed forms.

namespace spdcopt::oracle {

/// Frequency grid per axis, centered on zero detuning.
struct GridSpec {
  std::size_t n_points = 1024; ///< per axis, power of two, >= 256
  double span_a = 0.0;         ///< s^-1, full width of the nu_A axis
  double span_b = 0.0;
};

void validate(const GridSpec& grid);

/// n x n grid spanning 12 amplitude widths per axis, widened when needed so
/// the heralded width covers at least 6 time steps.
GridSpec default_grid(const SourceParams& source, double d_a, double d_b, std::size_t n_points = 1024);

/// |psi(t_A, t_B)|^2 on a uniform time grid, normalized to unit sum.
/// intensity[i * t_b.size() + j] is the value at (t_a[i], t_b[j]).
struct JointIntensity {
  std::vector<double> t_a;
  std::vector<double> t_b;
  std::vector<double> intensity;

  double at(std::size_t i, std::size_t j) const { return intensity[i * t_b.size() + j]; }
};

/// Throws DomainError when the grid is inadequate: intensity on the border
/// above 1e-12 of the peak (aliasing) or a spectral phase step above pi.
JointIntensity joint_temporal_intensity(const SourceParams& source, double d_a, double d_b,
                                        const GridSpec& grid);

struct EmpiricalWidths {
  double tau_a = 0.0;                ///< standard deviation of the t_A marginal
  double tau_ah = 0.0;               ///< mean conditional standard deviation
  std::vector<double> slice_times;   ///< heralding times T_B that were used
  std::vector<double> slice_widths;  ///< conditional widths at those times
  double max_slice_disagreement = 0.0;
  std::vector<std::string> warnings; ///< skipped slices
};

/// Marginal and conditional widths of photon A. Conditional slices are
/// taken at the t_B marginal peak and one marginal deviation either side;
/// they must agree to 1e-3 relative or ConsistencyError is thrown.
EmpiricalWidths empirical_widths(const JointIntensity& ji);

/// Circular convolution with independent Gaussian detector responses.
JointIntensity convolve_jitter(const JointIntensity& ji, double jitter_a, double jitter_b);

/// Widths from the factorized form of the propagated amplitude. The
/// Gaussian exponent is diagonalized so the two-photon amplitude becomes a
/// product of one-dimensional chirped transforms, each evaluated by FFT.
/// Covers chirp products far beyond what a direct 2-D grid can resolve.
EmpiricalWidths frame_oracle_widths(const SourceParams& source, double d_a, double d_b);

} // namespace spdcopt::oracle
