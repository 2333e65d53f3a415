#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include <spdcopt/analytic_optimizer.hpp>
#include <spdcopt/constants.hpp>
#include <spdcopt/numeric_optimizer.hpp>

namespace spdcopt::cli {

void report(std::ostream& os, const std::string& name, double value, const std::string& unit) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7g", value);
  os << name << " = " << buf;
  if (!unit.empty()) os << ' ' << unit;
  os << '\n';
}

namespace {

void report_flag(std::ostream& os, const std::string& name, bool value) {
  os << name << " = " << (value ? "true" : "false") << '\n';
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

void cmd_width(const RunContext& ctx) {
  std::ostream& os = *ctx.out;
  const QkdScenario s = scenario_of(ctx.config);
  const double d_a = accumulated_dispersion(s.channel_a);
  const double d_b = accumulated_dispersion(s.channel_b);
  const double j_a = s.detector_a.jitter, j_b = s.detector_b.jitter;

  report(os, "D_A", d_a, "s^2");
  report(os, "D_B", d_b, "s^2");
  report(os, "sigma_bandwidth_1550nm", sigma_to_wavelength_width(s.source.sigma, kTelecomWavelength) * 1e9,
         "nm");
  report(os, "tau_A", tau_unheralded(s.source, d_a), "s");
  report(os, "tau_Ah", tau_heralded(s.source, d_a, d_b), "s");
  report(os, "tau_B", tau_unheralded(s.source, d_b), "s");
  report(os, "tau_Bh", tau_heralded(s.source, d_b, d_a), "s");
  report(os, "X_A", heralding_jitter_weight(s.source, d_a, d_b));
  report(os, "X_B", heralding_jitter_weight(s.source, d_b, d_a));
  const double ja = tau_unheralded_jittered(s.source, d_a, j_a);
  const double jah = tau_heralded_jittered(s.source, d_a, d_b, j_a, j_b);
  report(os, "tau_A_jitter", ja, "s");
  report(os, "tau_Ah_jitter", jah, "s");
  report(os, "tau_B_jitter", tau_unheralded_jittered(s.source, d_b, j_b), "s");
  report(os, "tau_Bh_jitter", tau_heralded_jittered(s.source, d_b, d_a, j_b, j_a), "s");
  report(os, "jitter_share_Ah", 1.0 - tau_heralded(s.source, d_a, d_b) / jah);
}

void cmd_optimize(const RunContext& ctx) {
  std::ostream& os = *ctx.out;
  const QkdScenario s = scenario_of(ctx.config);
  const double d_a = accumulated_dispersion(s.channel_a);
  const double d_b = accumulated_dispersion(s.channel_b);
  const double sigma = s.source.sigma;
  report(os, "D_A", d_a, "s^2");
  report(os, "D_B", d_b, "s^2");
  report(os, "sigma", sigma, "s^-1");

  if (d_a != 0.0) {
    const UnheraldedOptimum u = tau_a_low(d_a, sigma);
    report(os, "unheralded.tau_p_opt", u.tau_p_opt, "s");
    report(os, "unheralded.tau_A_min", u.tau_a_min, "s");
  }

  const ScalarMinimum numeric = minimize_scalar(
      [&](double tp) { return tau_heralded(SourceParams{tp, sigma}, d_a, d_b); }, {1e-15, 1e-6, 1e-10, 1000});

  if (d_a < 0.0 && d_b < 0.0) {
    const PumpOptimum p = optimal_pump_fixed_crystal(d_a, d_b, sigma);
    os << "pump.regime = " << to_string(p.kind) << '\n';
    if (p.kind == PumpRegime::InfimumAtZero) os << "pump.note = infimum at tau_p -> 0\n";
    if (p.kind == PumpRegime::InfimumAtInfinity) os << "pump.note = infimum at tau_p -> infinity\n";
    if (p.tau_p_star) report(os, "pump.tau_p_star", *p.tau_p_star, "s");
    report(os, p.tau_p_star ? "pump.tau_Ah_min" : "pump.tau_Ah_limit", *p.tau_ah_at_optimum, "s");
    const CaseBoundaries cb = case_boundaries(d_a, d_b);
    auto opt = [&](const char* name, const std::optional<double>& v) {
      if (v)
        report(os, name, *v, "s^-1");
      else
        os << name << " = absent\n";
    };
    opt("boundary.xi_plus_minus", cb.xi_plus_minus);
    opt("boundary.xi_plus_plus", cb.xi_plus_plus);
    opt("boundary.zeta_minus_plus", cb.zeta_minus_plus);
    opt("boundary.zeta_minus_minus", cb.zeta_minus_minus);
    if (p.tau_p_star) report(os, "check.numeric_tau_p_rel_diff", rel_diff(numeric.x, *p.tau_p_star));
  } else {
    os << "pump.regime = not classified (closed-form classification needs both dispersions negative)\n";
  }
  report(os, "numeric.tau_p_star", numeric.x, "s");
  report(os, "numeric.tau_Ah_min", numeric.f, "s");
  report_flag(os, "numeric.boundary_hit", numeric.boundary_hit);

  if (d_a == d_b && d_a != 0.0) {
    const SymmetricOptimum so = symmetric_full_optimum(d_a);
    report(os, "symmetric.tau_p", so.tau_p, "s");
    report(os, "symmetric.sigma", so.sigma, "s^-1");
    report(os, "symmetric.tau_Ah", so.tau_ah, "s");
    report(os, "symmetric.tau_Ah_low_at_sigma", tau_ah_low_sym(d_a, sigma), "s");
  }
  if (ctx.config["optimize"]["full_2d"].get<bool>() && d_a != 0.0 && d_b != 0.0) {
    const FullOptimum f = full_optimum_2d(d_a, d_b);
    report(os, "full.tau_p", f.tau_p_star, "s");
    report(os, "full.sigma", f.sigma_star, "s^-1");
    report(os, "full.tau_Ah", f.tau_ah_star, "s");
    report_flag(os, "full.boundary_hit", f.boundary_hit);
    if (d_a == d_b) {
      const SymmetricOptimum so = symmetric_full_optimum(d_a);
      report(os, "check.full_vs_analytic_tau_p", rel_diff(f.tau_p_star, so.tau_p));
      report(os, "check.full_vs_analytic_sigma", rel_diff(f.sigma_star, so.sigma));
      report(os, "check.full_vs_analytic_tau_Ah", rel_diff(f.tau_ah_star, so.tau_ah));
    }
  }
}

void cmd_crystal_sigma(const RunContext& ctx) {
  std::ostream& os = *ctx.out;
  const CrystalSpec spec = crystal_of(ctx.config);
  const SellmeierSet set = sellmeier_of(ctx.config);
  const SigmaEstimate e = effective_sigma_details(spec, sigma_options_of(ctx.config), set);
  report(os, "n_o_signal", set.n_o(spec.signal_wavelength));
  report(os, "n_o_pump", set.n_o(spec.pump_wavelength));
  report(os, "n_e_pump", set.n_e(spec.pump_wavelength));
  report(os, "theta", e.theta * 180.0 / std::numbers::pi, "deg");
  report(os, "delta_k", e.delta_k);
  report(os, "delta_omega", e.delta_omega, "s/m");
  report(os, "sigma", e.sigma, "s^-1");
  report(os, "sigma_bandwidth", sigma_to_wavelength_width(e.sigma, spec.signal_wavelength) * 1e9, "nm");
  const ChannelParams ch = scenario_of(ctx.config).channel_a;
  if (ch.length > 0.0 && ch.beta != 0.0)
    report(os, "sigma_opt_symmetric_channel_a", symmetric_full_optimum(accumulated_dispersion(ch)).sigma, "s^-1");
}

namespace {

void report_metrics(std::ostream& os, const QkdMetrics& m, double pair_rate) {
  report(os, "xi_A", m.xi_a);
  report(os, "xi_B", m.xi_b);
  report(os, "p_exp", m.p_exp);
  report(os, "qber", m.qber);
  report(os, "key_rate", m.key_rate, "per pair");
  report(os, "raw_bound", m.raw_bound, "per pair");
  if (pair_rate > 0.0) report(os, "key_rate_abs", m.key_rate * pair_rate, "bit/s");
  report_flag(os, "insecure", m.insecure);
  report_flag(os, "window_boundary_hit", m.boundary_hit);
}

} // namespace

void cmd_qkd_rate(const RunContext& ctx) {
  std::ostream& os = *ctx.out;
  const QkdScenario s = scenario_of(ctx.config);
  const LinkWidths w = link_widths(s);
  report(os, "T_A", transmittance(s.channel_a));
  report(os, "T_B", transmittance(s.channel_b));
  report(os, "tau_A", w.tau_a, "s");
  report(os, "tau_Ah", w.tau_ah, "s");
  report(os, "tau_Bh", w.tau_bh, "s");
  const QkdMetrics m = ctx.config["qkd"]["optimize_windows"].get<bool>()
                           ? optimize_windows(s)
                           : key_rate(s, s.detector_a.window_factor, s.detector_b.window_factor);
  report_metrics(os, m, quantity(ctx.config, "qkd.pair_rate"));
}

void cmd_qkd_maxdist(const RunContext& ctx) {
  std::ostream& os = *ctx.out;
  const LinkTemplate link = link_template_of(ctx.config);
  const std::string arm_name = ctx.config["qkd"]["varied_arm"].get<std::string>();
  VariedArm arm;
  if (arm_name == "A")
    arm = VariedArm::A;
  else if (arm_name == "B")
    arm = VariedArm::B;
  else if (arm_name == "symmetric")
    arm = VariedArm::Symmetric;
  else
    throw ConfigError("qkd.varied_arm must be A, B or symmetric");
  DistanceOptions opt;
  opt.tolerance = quantity(ctx.config, "qkd.tolerance");
  const DistanceResult r = max_security_distance(link, arm, quantity(ctx.config, "qkd.other_length"), opt);
  os << "source_policy = " << to_string(link.policy) << '\n';
  os << "varied_arm = " << arm_name << '\n';
  report(os, "max_distance", r.length / 1000.0, "km");
  report_metrics(os, r.metrics, quantity(ctx.config, "qkd.pair_rate"));
}

} // namespace spdcopt::cli
