#pragma once

#include <cstdint>

#include "spdcopt/qkd_security.hpp"

// Event-level simulation of the entanglement-based link, used to check the
// closed-form acceptance probability and QBER.

namespace spdcopt::oracle {

struct SimulationResult {
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  std::uint64_t errors = 0;
  // Accepted events split by origin, in the order of the model's terms.
  std::uint64_t both_photons = 0;
  std::uint64_t a_photon_b_dark = 0;
  std::uint64_t a_dark_b_photon = 0;
  std::uint64_t both_dark = 0;

  double p_exp() const noexcept { return double(accepted) / double(trials); }
  double qber() const noexcept { return accepted ? double(errors) / double(accepted) : 0.0; }
};

/// Per pair: each photon survives its channel with probability T, arrives
/// at a standard-normal offset (in units of its width) and is registered
/// when inside the window. A party whose photon is missing registers a
/// dark count if at least one Poisson count (mean 2 d xi tau) falls in its
/// window; dark-count events carry a uniformly random bit.
SimulationResult simulate_link(const QkdScenario& scenario, double xi_a, double xi_b,
                               std::uint64_t trials, std::uint64_t seed);

} // namespace spdcopt::oracle
