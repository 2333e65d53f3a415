#include <cmath>
#include <ostream>
#include <random>

#include <spdcopt/analytic_optimizer.hpp>
#include <spdcopt/constants.hpp>
#include <spdcopt/oracle_fft.hpp>
#include <spdcopt/qkd_montecarlo.hpp>

#include "commands.hpp"

namespace spdcopt::cli {
namespace {

struct Settings {
  std::size_t oracle_points;
  std::size_t grid_points;
  std::size_t classification_samples;
  std::size_t mc_scenarios;
  std::uint64_t mc_trials;
  std::uint64_t seed;
  double perturb;
};

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

// Closed-form heralded width, optionally scaled to check that the suites notice.
double checked_tau_ah(const Settings& s, const SourceParams& src, double d_a, double d_b) {
  return tau_heralded(src, d_a, d_b) * (1.0 + s.perturb);
}

bool oracle_suite(const Settings& s, std::ostream& os) {
  std::mt19937_64 rng(s.seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.oracle_points; ++i) {
    const SourceParams src{log_uniform(rng, 1e-13, 1e-9), log_uniform(rng, 1e10, 1e13)};
    const double d_a = kSmfBeta * log_uniform(rng, 1.0, 1e5);
    const double d_b = kSmfBeta * log_uniform(rng, 1.0, 1e5);
    const oracle::EmpiricalWidths w = oracle::frame_oracle_widths(src, d_a, d_b);
    worst = std::max({worst, std::abs(w.tau_a / tau_unheralded(src, d_a) - 1.0),
                      std::abs(w.tau_ah / checked_tau_ah(s, src, d_a, d_b) - 1.0)});
  }
  // Direct two-dimensional grid at a moderate chirp.
  const SourceParams src{1e-12, 1e12};
  const double d = kSmfBeta * 1000.0;
  const oracle::JointIntensity ji =
      oracle::joint_temporal_intensity(src, d, d, oracle::default_grid(src, d, d, s.grid_points));
  const oracle::EmpiricalWidths g = oracle::empirical_widths(ji);
  const double grid_err = std::max(std::abs(g.tau_a / tau_unheralded(src, d) - 1.0),
                                   std::abs(g.tau_ah / checked_tau_ah(s, src, d, d) - 1.0));
  const bool ok = worst < 1e-3 && grid_err < 1e-3;
  os << "suite oracle: " << (ok ? "PASS" : "FAIL") << " (" << s.oracle_points
     << " factorized points, worst rel err " << worst << "; " << s.grid_points
     << "^2 grid rel err " << grid_err << ")\n";
  return ok;
}

PumpRegime brute_force_regime(double d_a, double d_b, double sigma, double* grid_min) {
  const auto grid = logspace(1e-15, 1e-6, 2000);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = tau_heralded(SourceParams{grid[i], sigma}, d_a, d_b);
  const double m = *std::min_element(v.begin(), v.end());
  *grid_min = m;
  if (v.back() <= m * (1.0 + 1e-12)) return PumpRegime::InfimumAtInfinity;
  if (v.front() <= m * (1.0 + 1e-12)) return PumpRegime::InfimumAtZero;
  return PumpRegime::InteriorMinimum;
}

bool classification_suite(const Settings& s, std::ostream& os) {
  std::mt19937_64 rng(s.seed + 1);
  std::size_t disagreements = 0, interior = 0, above_grid = 0;
  for (std::size_t i = 0; i < s.classification_samples; ++i) {
    const double d_a = kSmfBeta * log_uniform(rng, 1.0, 1e6);
    const double d_b = kSmfBeta * log_uniform(rng, 1.0, 1e6);
    const double sigma = log_uniform(rng, 1e9, 1e14);
    double grid_min = 0.0;
    const PumpRegime expected = brute_force_regime(d_a, d_b, sigma, &grid_min);
    const PumpOptimum p = optimal_pump_fixed_crystal(d_a, d_b, sigma);
    if (p.kind != expected) ++disagreements;
    if (p.kind == PumpRegime::InteriorMinimum) {
      ++interior;
      if (checked_tau_ah(s, SourceParams{*p.tau_p_star, sigma}, d_a, d_b) > grid_min * (1.0 + 1e-9)) ++above_grid;
    }
  }
  const bool ok = disagreements == 0 && above_grid == 0;
  os << "suite classification: " << (ok ? "PASS" : "FAIL") << " (" << s.classification_samples
     << " triples, " << disagreements << " disagreements, " << interior << " interior, " << above_grid
     << " optima above the grid minimum)\n";
  return ok;
}

bool montecarlo_suite(const Settings& s, std::ostream& os) {
  std::mt19937_64 rng(s.seed + 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t failures = 0;
  double worst_z = 0.0;
  for (std::size_t i = 0; i < s.mc_scenarios; ++i) {
    const double length = 1e3 * (10.0 + 110.0 * unit(rng));
    const double dark = log_uniform(rng, 1e3, 1e5);
    const double xi = 1.0 + 7.0 * unit(rng);
    const double jitter = 50e-12 * unit(rng);
    const SourceParams src{log_uniform(rng, 1e-12, 1e-9), log_uniform(rng, 1e10, 1e13)};
    const ChannelParams ch{length, kSmfBeta, kSmfAttenuation};
    const DetectorParams det{jitter, dark, xi};
    const QkdScenario sc{src, ch, ch, det, det};
    const double p = acceptance_probability(sc, xi, xi);
    const double q = qber(sc, xi, xi);
    const oracle::SimulationResult r = oracle::simulate_link(sc, xi, xi, s.mc_trials, s.seed + 100 + i);
    const double se_p = std::sqrt(p * (1.0 - p) / double(s.mc_trials));
    const double se_q = std::sqrt(q * (1.0 - q) / (p * double(s.mc_trials)));
    const double z_p = std::abs(r.p_exp() - p) / se_p;
    const double z_q = se_q > 0.0 ? std::abs(r.qber() - q) / se_q : 0.0;
    worst_z = std::max({worst_z, z_p, z_q});
    if (z_p > 3.0 || z_q > 3.0) ++failures;
  }
  const bool ok = failures == 0;
  os << "suite montecarlo: " << (ok ? "PASS" : "FAIL") << " (" << s.mc_scenarios << " scenarios x "
     << s.mc_trials << " pairs, worst deviation " << worst_z << " standard errors)\n";
  return ok;
}

} // namespace

void cmd_verify(const RunContext& ctx) {
  const Json& v = ctx.config["verify"];
  auto count = [&](const char* key) {
    const double x = v[key].get<double>();
    if (!(x >= 1.0) || x != std::floor(x)) throw ConfigError(std::string("verify.") + key + " must be a positive integer");
    return std::uint64_t(x);
  };
  Settings s{count("oracle_points"), count("grid_points"), count("classification_samples"),
             count("mc_scenarios"), count("mc_trials"), count("seed"), v["perturb_tau_ah"].get<double>()};
  std::ostream& os = *ctx.out;
  bool ok = true;
  for (const auto& suite : v["suites"]) {
    const std::string name = suite.get<std::string>();
    if (name == "oracle")
      ok &= oracle_suite(s, os);
    else if (name == "classification")
      ok &= classification_suite(s, os);
    else if (name == "montecarlo")
      ok &= montecarlo_suite(s, os);
    else
      throw ConfigError("unknown verify suite '" + name + "'");
  }
  if (!ok) throw VerificationFailure("verification failed");
  os << "all suites passed\n";
}

} // namespace spdcopt::cli
