// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <spdcopt/analytic_optimizer.hpp>
#include <spdcopt/constants.hpp>
#include <spdcopt/crystal_bbo.hpp>
#include <spdcopt/errors.hpp>
#include <spdcopt/numeric_optimizer.hpp>
#include <spdcopt/oracle_fft.hpp>
#include <spdcopt/qkd_montecarlo.hpp>
#include <spdcopt/qkd_security.hpp>
#include <spdcopt/temporal_model.hpp>

using namespace spdcopt;

namespace {

constexpr double kD1km = -1.15e-23;
constexpr double kD100km = -1.15e-21;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PumpRegime scan_regime(double d_a, double d_b, double sigma) {
  const std::vector<double> grid = logspace(1e-15, 1e-6, 2000);
  std::vector<double> v;
  v.reserve(grid.size());
  for (double tp : grid) v.push_back(tau_heralded({tp, sigma}, d_a, d_b));
  const double lo = *std::min_element(v.begin(), v.end());
  if (v.back() <= lo * (1.0 + 1e-12)) return PumpRegime::InfimumAtInfinity;
  if (v.front() <= lo * (1.0 + 1e-12)) return PumpRegime::InfimumAtZero;
  return PumpRegime::InteriorMinimum;
}

LinkTemplate link(SourcePolicy policy, double sigma = 1e12, double jitter = 0.0) {
  LinkTemplate t;
  t.source = {1e-9, sigma};
  t.policy = policy;
  t.beta = kSmfBeta;
  t.alpha_db_per_km = kSmfAttenuation;
  t.detector_a = {jitter, 1e3, 6.0};
  t.detector_b = {jitter, 1e3, 6.0};
  return t;
}

Outcome closed_form_vs_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const SourceParams src{log_uniform(rng, 1e-13, 1e-9), log_uniform(rng, 1e10, 1e13)};
    const double d_a = kSmfBeta * log_uniform(rng, 1.0, 1e5);
    const double d_b = kSmfBeta * log_uniform(rng, 1.0, 1e5);
    const oracle::EmpiricalWidths w = oracle::frame_oracle_widths(src, d_a, d_b);
    worst = std::max({worst, rel(w.tau_a, tau_unheralded(src, d_a)), rel(w.tau_ah, tau_heralded(src, d_a, d_b))});
  }
  // Plain joint grids where the chirp is resolvable.
  struct Point {
    SourceParams src;
    double d_a, d_b;
  };
  const std::vector<Point> direct = {{{1e-12, 1e12}, kD1km, kD1km},
                                     {{std::sqrt(2.0 * 1.15e-23), std::sqrt(2.0 / 1.15e-23)}, kD1km, kD1km},
                                     {{1e-12, 5e11}, kD1km, 0.3 * kD1km},
                                     {{2e-12, 3e11}, 0.0, 0.0}};
  double worst_grid = 0.0;
  for (const Point& p : direct) {
    const auto w = oracle::empirical_widths(
        oracle::joint_temporal_intensity(p.src, p.d_a, p.d_b, oracle::default_grid(p.src, p.d_a, p.d_b)));
    worst_grid = std::max({worst_grid, rel(w.tau_a, tau_unheralded(p.src, p.d_a)),
                           rel(w.tau_ah, tau_heralded(p.src, p.d_a, p.d_b))});
  }
  const double elapsed = seconds_since(t0);
  return {worst < 1e-3 && worst_grid < 1e-3 && elapsed < 120.0,
          "100 random points worst " + num(worst) + ", direct grids worst " + num(worst_grid) + ", " +
              num(elapsed) + " s"};
}

Outcome symmetric_optimum() {
  const SymmetricOptimum a = symmetric_full_optimum(kD1km);
  const FullOptimum n = full_optimum_2d(kD1km, kD1km);
  const bool analytic = rel(a.tau_p, 4.796e-12) < 5e-4 && rel(a.sigma, 4.170e11) < 5e-4 && rel(a.tau_ah, 4.796e-12) < 5e-4;
  const double worst = std::max({rel(n.tau_p_star, a.tau_p), rel(n.sigma_star, a.sigma), rel(n.tau_ah_star, a.tau_ah)});
  return {analytic && worst < 0.01 && !n.boundary_hit,
          "analytic (" + num(a.tau_p) + " s, " + num(a.sigma) + " s^-1, " + num(a.tau_ah) + " s), numeric worst " +
              num(worst)};
}

Outcome short_link_pump() {
  const FullOptimum o = full_optimum_2d(kSmfBeta, kSmfBeta);
  return {rel(o.tau_p_star, 150e-15) < 0.05, "tau_p* = " + num(o.tau_p_star) + " s"};
}

Outcome bandwidth_conversion() {
  const double w = sigma_to_wavelength_width(1e11, 1550e-9);
  const double back = wavelength_width_to_sigma(w, 1550e-9);
  return {rel(w, 0.13e-9) < 0.05 && rel(back, 1e11) < 1e-12, "sigma 1e11 s^-1 -> " + num(w * 1e9) + " nm"};
}

Outcome regime_classification() {
  const PumpOptimum ex = optimal_pump_fixed_crystal(kD1km, kD100km, 1e11);
  const bool example = ex.kind == PumpRegime::InfimumAtZero && scan_regime(kD1km, kD100km, 1e11) == ex.kind;
  std::mt19937_64 rng(1005);
  int disagreements = 0;
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    const double d_a = kSmfBeta * log_uniform(rng, 1.0, 1e6);
    const double d_b = kSmfBeta * log_uniform(rng, 1.0, 1e6);
    const double sigma = log_uniform(rng, 1e9, 1e14);
    if (optimal_pump_fixed_crystal(d_a, d_b, sigma).kind != scan_regime(d_a, d_b, sigma)) ++disagreements;
  }
  return {example && disagreements == 0, std::string("example ") + std::string(to_string(ex.kind)) + ", " +
                                             std::to_string(disagreements) + " disagreements in " +
                                             std::to_string(n) + " random triples"};
}

Outcome arm_swap() {
  std::mt19937_64 rng(1006);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const SourceParams src{log_uniform(rng, 1e-14, 1e-8), log_uniform(rng, 1e9, 1e14)};
    const double d_a = kSmfBeta * log_uniform(rng, 1.0, 1e6);
    const double d_b = kSmfBeta * log_uniform(rng, 1.0, 1e6);
    const double lhs = tau_unheralded(src, d_a) * tau_heralded(src, d_b, d_a);
    const double rhs = tau_unheralded(src, d_b) * tau_heralded(src, d_a, d_b);
    worst = std::max(worst, rel(lhs, rhs));
  }
  return {worst < 1e-12, "worst relative mismatch " + num(worst) + " over 10000 points"};
}

Outcome jitter_weight() {
  std::mt19937_64 rng(1007);
  // Zeros: the residue left by rounding is compared with the value 1% away.
  double worst_zero = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double sigma = log_uniform(rng, 1e9, 1e14);
    const double d_a = kSmfBeta * log_uniform(rng, 1.0, 1e6);
    const double d_b = kSmfBeta * log_uniform(rng, 1.0, 1e6);
    for (double tp : {2.0 / sigma, std::sqrt(d_a * d_b) * sigma}) {
      const double at = heralding_jitter_weight({tp, sigma}, d_a, d_b);
      const double near = heralding_jitter_weight({1.01 * tp, sigma}, d_a, d_b);
      worst_zero = std::max(worst_zero, at / near);
    }
  }
  int spurious = 0;
  for (int i = 0; i < 1000; ++i) {
    const SourceParams src{log_uniform(rng, 1e-14, 1e-8), log_uniform(rng, 1e9, 1e14)};
    const double d_a = kSmfBeta * log_uniform(rng, 1.0, 1e6);
    const double d_b = kSmfBeta * log_uniform(rng, 1.0, 1e6);
    const double r1 = src.sigma * src.tau_p / 2.0, r2 = src.tau_p / (std::sqrt(d_a * d_b) * src.sigma);
    if (std::abs(std::log(r1)) > 1e-3 && std::abs(std::log(r2)) > 1e-3 &&
        !(heralding_jitter_weight(src, d_a, d_b) > 0.0))
      ++spurious;
  }
  const bool zeros = worst_zero < 1e-20 && spurious == 0;

  const SourceParams src{1e-12, 1e12};
  const double j = 1e-11;
  const auto ji = oracle::convolve_jitter(
      oracle::joint_temporal_intensity(src, kD1km, kD1km, oracle::default_grid(src, kD1km, kD1km)), j, j);
  const oracle::EmpiricalWidths w = oracle::empirical_widths(ji);
  const double e_a = rel(w.tau_a, tau_unheralded_jittered(src, kD1km, j));
  const double e_ah = rel(w.tau_ah, tau_heralded_jittered(src, kD1km, kD1km, j, j));
  return {zeros && e_a < 1e-3 && e_ah < 1e-3,
          "zero residue " + num(worst_zero) + ", " + std::to_string(spurious) + " spurious zeros; oracle tau_Ah^J " +
              num(w.tau_ah) + " s vs closed form " + num(tau_heralded_jittered(src, kD1km, kD1km, j, j)) +
              " s (rel " + num(e_ah) + "), tau_A^J rel " + num(e_a)};
}

struct Distances {
  double fixed = 0.0, pump = 0.0, full = 0.0, full_jitter = 0.0;
  double seconds = 0.0;
};

const Distances& headline_distances() {
  static const Distances d = [] {
    const auto t0 = std::chrono::steady_clock::now();
    Distances out;
    out.fixed = max_security_distance(link(SourcePolicy::Fixed), VariedArm::Symmetric).length;
    out.pump = max_security_distance(link(SourcePolicy::PumpMatched), VariedArm::Symmetric).length;
    out.full = max_security_distance(link(SourcePolicy::FullyMatched), VariedArm::Symmetric).length;
    out.full_jitter =
        max_security_distance(link(SourcePolicy::FullyMatched, 1e12, 100e-12), VariedArm::Symmetric).length;
    out.seconds = seconds_since(t0);
    return out;
  }();
  return d;
}

Outcome qkd_headline() {
  const Distances& d = headline_distances();
  const double gain_full = d.full / d.fixed - 1.0;
  const double gain_pump = d.pump / d.fixed - 1.0;
  const bool ok = std::abs(gain_full - 0.30) <= 0.05 && std::abs(gain_pump - 0.20) <= 0.05 && d.seconds < 300.0;
  return {ok, "L_max fixed " + num(d.fixed / 1e3) + " km, pump-matched " + num(d.pump / 1e3) + " km (+" +
                  num(100.0 * gain_pump) + "%, band 15-25%), fully matched " + num(d.full / 1e3) + " km (+" +
                  num(100.0 * gain_full) + "%, band 25-35%), " + num(d.seconds) + " s"};
}

Outcome jitter_robustness() {
  const Distances& d = headline_distances();
  const double loss = d.full - d.full_jitter;
  return {loss < 10e3, "100 ps jitter shortens " + num(d.full / 1e3) + " km to " + num(d.full_jitter / 1e3) +
                           " km (" + num(loss / 1e3) + " km)"};
}

Outcome heralding_arm() {
  const std::vector<double> lb = {1e3, 5e3, 10e3, 25e3, 50e3};
  auto reach = [&](double sigma) {
    std::vector<double> out;
    for (double l : lb) out.push_back(max_security_distance(link(SourcePolicy::PumpOptimized, sigma), VariedArm::A, l).length);
    return out;
  };
  const std::vector<double> wide = reach(1e12);
  const std::vector<double> narrow = reach(1e10);
  const double sigma_opt = symmetric_full_optimum(kSmfBeta * narrow.front()).sigma;
  bool wide_ok = wide.back() - wide.front() >= 10e3;
  bool narrow_ok = narrow.back() < narrow.front() && 1e10 < sigma_opt;
  for (std::size_t i = 1; i < lb.size(); ++i) {
    wide_ok = wide_ok && wide[i] >= wide[i - 1];
    narrow_ok = narrow_ok && narrow[i] <= narrow[i - 1];
  }
  return {wide_ok && narrow_ok && 1e12 > symmetric_full_optimum(kSmfBeta * wide.back()).sigma,
          "sigma 1e12: L_A max " + num(wide.front() / 1e3) + " -> " + num(wide.back() / 1e3) +
              " km for L_B 1 -> 50 km; sigma 1e10 (sigma_opt " + num(sigma_opt) + "): " + num(narrow.front() / 1e3) +
              " -> " + num(narrow.back() / 1e3) + " km"};
}

Outcome monte_carlo() {
  std::mt19937_64 rng(1011);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::uint64_t trials = 10'000'000;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
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
    const oracle::SimulationResult r = oracle::simulate_link(sc, xi, xi, trials, 5000 + std::uint64_t(i));
    const double se_p = std::sqrt(p * (1.0 - p) / double(trials));
    const double se_q = std::sqrt(q * (1.0 - q) / (p * double(trials)));
    worst = std::max({worst, std::abs(r.p_exp() - p) / se_p, se_q > 0.0 ? std::abs(r.qber() - q) / se_q : 0.0});
  }
  return {worst <= 3.0, "10 scenarios x 1e7 pairs, worst deviation " + num(worst) + " standard errors"};
}

Outcome crystal() {
  auto spec = [](double length, double wf, double alpha_deg) {
    CrystalSpec s;
    s.length = length;
    s.mode_width = wf;
    s.emission_angle = alpha_deg * kPi / 180.0;
    return s;
  };
  // Continuity: the largest change between neighbouring angles must shrink
  // in proportion when the angular step is halved.
  auto largest_step = [&](double l, double wf, std::size_t n, bool* finite) {
    double prev = effective_sigma(spec(l, wf, 0.0)), worst = 0.0;
    for (double a : linspace(0.0, 15.0, n)) {
      const double s = effective_sigma(spec(l, wf, a));
      *finite = *finite && std::isfinite(s) && s > 0.0;
      worst = std::max(worst, std::abs(std::log(s / prev)));
      prev = s;
    }
    return worst;
  };
  bool continuous = true;
  double worst_ratio = 0.0;
  for (double l : {1e-3, 1e-2})
    for (double wf : {1e-5, 1e-4, 1e-3}) {
      const double coarse = largest_step(l, wf, 241, &continuous);
      const double fine = largest_step(l, wf, 481, &continuous);
      worst_ratio = std::max(worst_ratio, fine / coarse);
    }
  continuous = continuous && worst_ratio < 0.6;
  const std::vector<double> alphas = linspace(0.0, 15.0, 241);
  // Collinear emission (alpha = 0) has no transverse term, so W_f cannot matter there.
  int misordered = 0;
  for (double a : alphas) {
    for (double wf : {1e-5, 1e-4, 1e-3})
      if (!(effective_sigma(spec(1e-2, wf, a)) < effective_sigma(spec(1e-3, wf, a)))) ++misordered;
    if (a == 0.0) continue;
    for (double l : {1e-3, 1e-2})
      if (!(effective_sigma(spec(l, 1e-3, a)) < effective_sigma(spec(l, 1e-4, a)) &&
            effective_sigma(spec(l, 1e-4, a)) < effective_sigma(spec(l, 1e-5, a))))
        ++misordered;
  }
  double worst_dk = 0.0;
  const double ws = 2.0 * kPi * kSpeedOfLight / 1550e-9;
  for (double a : {0.0, 5.0, 10.0, 15.0}) {
    const CrystalSpec s = spec(1e-2, 1e-4, a);
    const double kx = signal_transverse_wavevector(s);
    worst_dk = std::max(worst_dk, std::abs(phase_mismatch(ws, ws, kx, -kx, phase_matching_angle(s))));
  }
  double worst_fd = 0.0;
  for (double a : {0.0, 2.0, 7.5, 15.0}) {
    const SigmaEstimate full = effective_sigma_details(spec(1e-2, 1e-4, a), {DetuningMode::SignalOnly, 1e-6});
    const SigmaEstimate half = effective_sigma_details(spec(1e-2, 1e-4, a), {DetuningMode::SignalOnly, 5e-7});
    worst_fd = std::max(worst_fd, rel(half.sigma, full.sigma));
  }
  return {continuous && misordered == 0 && worst_dk < 1e-3 && worst_fd < 1e-4,
          std::string(continuous ? "continuous" : "discontinuous") + " (step-halving jump ratio " + num(worst_ratio) + "), " + std::to_string(misordered) +
              " ordering violations, |dk_z| " + num(worst_dk) + " 1/m, step-halving change " + num(worst_fd)};
}

} // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"closed-form widths vs oracle", closed_form_vs_oracle},
      {"symmetric optimum", symmetric_optimum},
      {"1 m pump duration near 150 fs", short_link_pump},
      {"bandwidth conversion", bandwidth_conversion},
      {"regime classification", regime_classification},
      {"arm-swap identity", arm_swap},
      {"jitter weight and jittered widths", jitter_weight},
      {"QKD distance gains", qkd_headline},
      {"jitter robustness", jitter_robustness},
      {"heralding-arm effect", heralding_arm},
      {"Monte-Carlo link oracle", monte_carlo},
      {"crystal properties", crystal},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %-34s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
