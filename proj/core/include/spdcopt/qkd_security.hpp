#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "spdcopt/numeric_optimizer.hpp"
#include "spdcopt/temporal_model.hpp"

// Entanglement-based BB84 with a central pair source: acceptance
// probability, QBER and the asymptotic key-rate bound per emitted pair.
// Dark counts are the only error source.

namespace spdcopt {

struct QkdScenario {
  SourceParams source;
  ChannelParams channel_a;
  ChannelParams channel_b;
  DetectorParams detector_a;
  DetectorParams detector_b;
};

void validate(const QkdScenario& scenario);

struct QkdMetrics {
  double p_exp = 0.0;
  double qber = 0.0;
  double key_rate = 0.0;  ///< max(0, raw_bound), per emitted pair
  double raw_bound = 0.0; ///< p_exp (1 - 2 H(Q)), may be negative
  double xi_a = 0.0;
  double xi_b = 0.0;
  bool insecure = false;     ///< no positive key anywhere in the window search
  bool boundary_hit = false; ///< a window factor sits on the search box edge
};

/// 10^(-alpha L / 10) with alpha in dB/km and L in meters.
double transmittance(const ChannelParams& channel);

/// Fraction of a Gaussian arrival distribution inside a window of xi widths.
double window_capture(double xi);

struct DarkCountProbability {
  double value = 0.0;
  bool saturated = false; ///< 2 d xi tau exceeded 1 and was capped
};

DarkCountProbability dark_count_probability_checked(double xi, double tau, double dark_rate);
double dark_count_probability(double xi, double tau, double dark_rate);

/// Shannon entropy in bits, H(0) = H(1) = 0.
double binary_entropy(double x);

/// Error rate in (0, 0.5) where 1 - 2 H(Q) changes sign.
double bb84_error_threshold();

/// Widths entering the window model, jitter included when nonzero.
struct LinkWidths {
  double tau_a = 0.0;  ///< photon A, unheralded
  double tau_ah = 0.0; ///< photon A, heralded by B
  double tau_b = 0.0;
  double tau_bh = 0.0;
};

LinkWidths link_widths(const QkdScenario& scenario);

/// The four contributions to the acceptance probability.
struct AcceptanceTerms {
  double both_photons = 0.0;   ///< T_A eta_A T_B eta_B
  double a_photon_b_dark = 0.0;
  double a_dark_b_photon = 0.0;
  double both_dark = 0.0;

  double total() const noexcept { return both_photons + a_photon_b_dark + a_dark_b_photon + both_dark; }
};

AcceptanceTerms acceptance_terms(const QkdScenario& scenario, double xi_a, double xi_b);
double acceptance_probability(const QkdScenario& scenario, double xi_a, double xi_b);

/// Throws DomainError when the acceptance probability is zero.
double qber(const QkdScenario& scenario, double xi_a, double xi_b);

QkdMetrics key_rate(const QkdScenario& scenario, double xi_a, double xi_b);

struct WindowSearchOptions {
  double lo = 0.1;
  double hi = 20.0;
  double start = 6.0;
  int refinement_rounds = 2; ///< minimum rounds after the initial pass
  int max_rounds = 8;
  double rel_tol = 1e-6;
};

/// Maximize the key-rate bound over (xi_A, xi_B) by alternating
/// golden-section searches. The unclamped bound is maximized so the search
/// keeps a gradient below the error threshold.
QkdMetrics optimize_windows(const QkdScenario& scenario, const WindowSearchOptions& options = {});

/// How the source is chosen for each probed link.
enum class SourcePolicy {
  Fixed,         ///< template source as given
  PumpMatched,   ///< tau_p = sqrt(2 |beta L_A|), sigma from the template
  FullyMatched,  ///< symmetric optimum for D = beta L_A
  PumpOptimized, ///< tau_p minimizing tau_Ah numerically, sigma from the template
};

std::string_view to_string(SourcePolicy policy) noexcept;

struct LinkTemplate {
  SourceParams source;
  SourcePolicy policy = SourcePolicy::Fixed;
  double beta = 0.0;            ///< s^2/m, both arms
  double alpha_db_per_km = 0.0; ///< both arms
  DetectorParams detector_a;
  DetectorParams detector_b;
  WindowSearchOptions windows;
};

/// Link template instantiated at the given arm lengths. Matched designs use
/// at least 1 m of fiber so the design dispersion is nonzero.
QkdScenario instantiate(const LinkTemplate& link, double length_a, double length_b);

enum class VariedArm { A, B, Symmetric };

struct DistanceOptions {
  double tolerance = 1.0;      ///< m
  double initial_upper = 2e5;  ///< m, doubled until insecure
  double max_length = 1e7;     ///< m
};

struct DistanceResult {
  double length = 0.0; ///< largest probed length with a positive key
  QkdMetrics metrics;  ///< optimized metrics at that length
};

/// Largest length of the varied arm (both arms for Symmetric) with a
/// positive key, windows re-optimized at each probe. Throws DomainError
/// when the link is insecure at zero length.
DistanceResult max_security_distance(const LinkTemplate& link, VariedArm arm,
                                     double other_length = 0.0,
                                     const DistanceOptions& options = {});

enum class HeraldingLengthPolicy { Fixed, Equal, Optimized };

struct KeyRateSweep {
  SweepResult table;                ///< K over the L_A axis
  std::vector<double> length_b;     ///< L_B used at each point
  std::vector<QkdMetrics> metrics;
};

/// K(L_A) with per-point window optimization. For Optimized, L_B is chosen
/// in [1 m, max_length_b] to maximize the bound at each L_A.
KeyRateSweep keyrate_sweep(const LinkTemplate& link, std::vector<double> length_a,
                           HeraldingLengthPolicy policy, double fixed_length_b = 0.0,
                           double max_length_b = 3e5, unsigned threads = 1);

} // namespace spdcopt
