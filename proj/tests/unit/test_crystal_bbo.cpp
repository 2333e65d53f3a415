#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <spdcopt/analytic_optimizer.hpp>
#include <spdcopt/constants.hpp>
#include <spdcopt/crystal_bbo.hpp>
#include <spdcopt/errors.hpp>

#include "support.hpp"

using namespace spdcopt;
using spdcopt::test::rel_diff;

namespace {

constexpr double kPi = std::numbers::pi;

double omega_of(double wavelength) { return 2.0 * kPi * kSpeedOfLight / wavelength; }

double deg(double d) { return d * kPi / 180.0; }

CrystalSpec spec_of(double length, double mode_width, double alpha_deg) {
  CrystalSpec s;
  s.length = length;
  s.mode_width = mode_width;
  s.emission_angle = deg(alpha_deg);
  return s;
}

} // namespace

TEST_CASE("Sellmeier indices") {
  CHECK(refractive_index_o(1550e-9) == doctest::Approx(1.6465).epsilon(3e-4));
  CHECK(refractive_index_o(775e-9) == doctest::Approx(1.6611).epsilon(3e-4));

  // Hand evaluation of the ordinary dispersion formula at 1 um.
  const double n2 = 2.7359 + 0.01878 / (1.0 - 0.01822) - 0.01354;
  CHECK(refractive_index_o(1e-6) == doctest::Approx(std::sqrt(n2)).epsilon(1e-14));

  for (double wl = 230e-9; wl < 1.7e-6; wl += 10e-9) CHECK(refractive_index_e(wl) < refractive_index_o(wl));
  double prev_o = 10.0, prev_e = 10.0;
  for (double wl = 700e-9; wl <= 1600e-9; wl += 5e-9) {
    CHECK(refractive_index_o(wl) < prev_o);
    CHECK(refractive_index_e(wl) < prev_e);
    prev_o = refractive_index_o(wl);
    prev_e = refractive_index_e(wl);
  }
  CHECK_THROWS_AS(refractive_index_o(3e-6), DomainError);
  CHECK_THROWS_AS(refractive_index_e(100e-9), DomainError);
}

TEST_CASE("Sellmeier data file") {
  const SellmeierSet file = SellmeierSet::load(SPDCOPT_DATA_DIR "/bbo_dmitriev.json");
  const SellmeierSet& builtin = bbo_dmitriev();
  CHECK(file.min_wavelength == builtin.min_wavelength);
  CHECK(file.max_wavelength == builtin.max_wavelength);
  for (double wl : {300e-9, 775e-9, 1064e-9, 1550e-9}) {
    CHECK(file.n_o(wl) == builtin.n_o(wl));
    CHECK(file.n_e(wl) == builtin.n_e(wl));
  }
  CHECK_THROWS_AS(SellmeierSet::from_json(R"({"name": "x", "validity_range_m": [1e-7, 2e-6],
      "ordinary": [2.7, 0.01, 0.01, 0.01], "extraordinary": [2.3, 0.01, 0.01, 0.01], "color": 1})"),
                  DomainError);
  CHECK_THROWS_AS(SellmeierSet::from_json(R"({"name": "positive", "validity_range_m": [1e-7, 2e-6],
      "ordinary": [2.3, 0.01, 0.01, 0.01], "extraordinary": [2.7, 0.01, 0.01, 0.01]})"),
                  DomainError);
  CHECK_THROWS_AS(SellmeierSet::from_json("[1, 2"), DomainError);
  CHECK_THROWS_AS(SellmeierSet::load("/nonexistent/sellmeier.json"), DomainError);
}

TEST_CASE("pump index versus angle") {
  const double wp = omega_of(775e-9);
  CHECK(refractive_index_pump(wp, 0.0) == doctest::Approx(refractive_index_o(775e-9)).epsilon(1e-15));
  CHECK(refractive_index_pump(wp, kPi / 2) == doctest::Approx(refractive_index_e(775e-9)).epsilon(1e-12));
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> wl(400e-9, 1600e-9), th(0.0, kPi / 2);
  for (int i = 0; i < 10000; ++i) {
    const double l = wl(rng);
    const double n = refractive_index_pump(omega_of(l), th(rng));
    CHECK(n >= refractive_index_e(l) * (1.0 - 1e-15));
    CHECK(n <= refractive_index_o(l) * (1.0 + 1e-15));
  }
}

TEST_CASE("phase mismatch") {
  const double wp = omega_of(775e-9);
  const double ws = wp / 2.0;
  SUBCASE("normal dispersion at theta = 0") {
    const double expect = wp / kSpeedOfLight * (refractive_index_o(775e-9) - refractive_index_o(1550e-9));
    const double dk = phase_mismatch(ws, ws, 0.0, 0.0, 0.0);
    CHECK(dk > 0.0);
    CHECK(rel_diff(dk, expect) < 1e-9);
  }
  SUBCASE("vanishes at the matching angle and decreases with theta") {
    const CrystalSpec s = spec_of(1e-2, 1e-4, 0.0);
    const double theta = phase_matching_angle(s);
    CHECK(std::abs(phase_mismatch(ws, ws, 0.0, 0.0, theta)) < 1e-6);
    const double h = 1e-6;
    CHECK(phase_mismatch(ws, ws, 0.0, 0.0, theta + h) < phase_mismatch(ws, ws, 0.0, 0.0, theta - h));
  }
  CHECK_THROWS_AS(phase_mismatch(ws, ws, 1e8, 0.0, 0.3), DomainError);
}

TEST_CASE("phase-matching angle") {
  SUBCASE("collinear angle solves n_e(theta) = n_o at the signal") {
    const double no_p = refractive_index_o(775e-9), ne_p = refractive_index_e(775e-9);
    const double ns = refractive_index_o(1550e-9);
    const double s2 = (1.0 / (no_p * no_p) - 1.0 / (ns * ns)) / (1.0 / (no_p * no_p) - 1.0 / (ne_p * ne_p));
    const double expect = std::asin(std::sqrt(s2));
    const double theta = phase_matching_angle(spec_of(1e-2, 1e-4, 0.0));
    CHECK(std::abs(theta - expect) < 1e-9);
    CHECK(theta * 180.0 / kPi == doctest::Approx(19.84).epsilon(1e-3));
  }
  SUBCASE("monotone in the emission angle") {
    double prev = 0.0;
    for (double a = 0.0; a <= 15.0; a += 0.25) {
      const double theta = phase_matching_angle(spec_of(1e-2, 1e-4, a));
      CHECK(theta > prev);
      prev = theta;
    }
  }
  SUBCASE("continuous in the pump wavelength") {
    CrystalSpec s = spec_of(1e-2, 1e-4, 3.0);
    const double t0 = phase_matching_angle(s);
    s.pump_wavelength = 776e-9;
    s.signal_wavelength = 1552e-9;
    CHECK(std::abs(phase_matching_angle(s) - t0) < deg(1.0));
  }
  CrystalSpec bad = spec_of(1e-2, 1e-4, 0.0);
  bad.signal_wavelength = 1500e-9;
  CHECK_THROWS_AS(phase_matching_angle(bad), DomainError);
}

TEST_CASE("effective phase-matching width") {
  SUBCASE("ordering in crystal length and mode width") {
    for (double a : {0.0, 1.0, 5.0, 10.0, 15.0}) {
      for (double wf : {1e-5, 1e-4, 1e-3})
        CHECK(effective_sigma(spec_of(1e-2, wf, a)) < effective_sigma(spec_of(1e-3, wf, a)));
      for (double l : {1e-3, 1e-2}) {
        // Collinear emission: the transverse derivative vanishes and W_f drops out.
        if (a == 0.0) {
          CHECK(rel_diff(effective_sigma(spec_of(l, 1e-4, a)), effective_sigma(spec_of(l, 1e-5, a))) < 1e-9);
          continue;
        }
        CHECK(effective_sigma(spec_of(l, 1e-4, a)) < effective_sigma(spec_of(l, 1e-5, a)));
        CHECK(effective_sigma(spec_of(l, 1e-3, a)) < effective_sigma(spec_of(l, 1e-4, a)));
      }
    }
  }
  SUBCASE("continuous and finite over the scan") {
    double prev = effective_sigma(spec_of(1e-2, 1e-4, 0.0));
    for (int i = 1; i <= 600; ++i) {
      const double s = effective_sigma(spec_of(1e-2, 1e-4, 15.0 * i / 600.0));
      CHECK(std::isfinite(s));
      CHECK(s > 0.0);
      CHECK(std::abs(std::log(s / prev)) < 0.1);
      prev = s;
    }
  }
  SUBCASE("finite differences converge on step halving") {
    for (double a : {0.0, 2.0, 7.5, 15.0}) {
      const CrystalSpec s = spec_of(1e-2, 1e-4, a);
      const SigmaEstimate full = effective_sigma_details(s, {DetuningMode::SignalOnly, 1e-6});
      const SigmaEstimate half = effective_sigma_details(s, {DetuningMode::SignalOnly, 5e-7});
      CHECK(rel_diff(half.sigma, full.sigma) < 1e-4);
      CHECK(rel_diff(half.delta_omega, full.delta_omega) < 1e-4);
    }
  }
  SUBCASE("hand-assembled formula") {
    const CrystalSpec s = spec_of(1e-3, 1e-5, 4.0);
    const SigmaEstimate e = effective_sigma_details(s);
    const double expect = std::sqrt((std::pow(e.delta_k / 1e-5, 2) + 5.0 / 1e-6) / std::pow(e.delta_omega, 2));
    CHECK(rel_diff(e.sigma, expect) < 1e-14);
  }
  SUBCASE("anti-correlated detuning is stationary at degeneracy") {
    CHECK_THROWS_AS(effective_sigma(spec_of(1e-2, 1e-4, 5.0), {DetuningMode::AntiCorrelated, 1e-6}),
                    DomainError);
  }
  SUBCASE("reference lines") {
    CHECK(symmetric_full_optimum(kSmfBeta * 1e3).sigma == doctest::Approx(4.17e11).epsilon(1e-3));
    CHECK(symmetric_full_optimum(kSmfBeta * 1e5).sigma == doctest::Approx(4.17e10).epsilon(1e-3));
  }
  CHECK_THROWS_AS(effective_sigma(spec_of(0.0, 1e-4, 0.0)), DomainError);
  CHECK_THROWS_AS(effective_sigma(spec_of(1e-2, 1e-4, 90.0)), DomainError);
}
