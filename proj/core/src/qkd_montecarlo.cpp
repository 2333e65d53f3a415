#include "spdcopt/qkd_montecarlo.hpp"

#include <cmath>
#include <random>

#include "spdcopt/errors.hpp"

namespace spdcopt::oracle {

SimulationResult simulate_link(const QkdScenario& scenario, double xi_a, double xi_b,
                               std::uint64_t trials, std::uint64_t seed) {
  validate(scenario);
  if (!(xi_a > 0.0 && xi_b > 0.0)) throw DomainError("window factors must be positive");
  if (trials == 0) throw DomainError("simulation needs at least one trial");

  const LinkWidths w = link_widths(scenario);
  const double t_a = transmittance(scenario.channel_a);
  const double t_b = transmittance(scenario.channel_b);
  const double d_a = scenario.detector_a.dark_rate;
  const double d_b = scenario.detector_b.dark_rate;
  // Probability of at least one Poisson dark count in a window.
  auto any_count = [](double mean) { return -std::expm1(-mean); };
  const double q_ah = any_count(2.0 * d_a * xi_a * w.tau_ah);
  const double q_a = any_count(2.0 * d_a * xi_a * w.tau_a);
  const double q_bh = any_count(2.0 * d_b * xi_b * w.tau_bh);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  auto photon_registered = [&](double transmit, double xi) {
    if (!(uniform(rng) < transmit)) return false;
    return std::abs(normal(rng)) <= 0.5 * xi;
  };

  SimulationResult r;
  r.trials = trials;
  for (std::uint64_t n = 0; n < trials; ++n) {
    const bool a = photon_registered(t_a, xi_a);
    const bool b = photon_registered(t_b, xi_b);
    if (a && b) {
      ++r.both_photons;
      ++r.accepted;
      continue;
    }
    bool accepted = false;
    if (a) {
      accepted = uniform(rng) < q_bh;
      r.a_photon_b_dark += accepted;
    } else if (b) {
      accepted = uniform(rng) < q_ah;
      r.a_dark_b_photon += accepted;
    } else {
      const bool dark_a = uniform(rng) < q_a;
      const bool dark_b = uniform(rng) < q_bh;
      accepted = dark_a && dark_b;
      r.both_dark += accepted;
    }
    if (accepted) {
      ++r.accepted;
      r.errors += coin(rng);
    }
  }
  return r;
}

} // namespace spdcopt::oracle
