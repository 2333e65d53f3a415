#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <spdcopt/analytic_optimizer.hpp>
#include <spdcopt/constants.hpp>
#include <spdcopt/errors.hpp>
#include <spdcopt/numeric_optimizer.hpp>

#include "commands.hpp"
#include "table.hpp"

namespace spdcopt::cli {
namespace {

constexpr double kKm = 1000.0;

std::size_t flat_index(const std::vector<SweepAxis>& axes, std::span<const double> coords) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const auto& v = axes[k].values;
    const auto it = std::find(v.begin(), v.end(), coords[k]);
    idx = idx * v.size() + std::size_t(it - v.begin());
  }
  return idx;
}

// Axis coordinate columns of a sweep, in row-major order.
void add_axis_columns(Table& table, const SweepResult& r) {
  std::vector<std::vector<double>> cols(r.axes.size(), std::vector<double>(r.cell_count()));
  for (std::size_t i = 0; i < r.cell_count(); ++i) {
    const auto c = r.coordinates(i);
    for (std::size_t k = 0; k < c.size(); ++k) cols[k][i] = c[k];
  }
  for (std::size_t k = 0; k < r.axes.size(); ++k) table.add(r.axes[k].name, r.axes[k].unit, std::move(cols[k]));
}

Json failures_json(const SweepResult& r) {
  Json f = Json::array();
  for (const auto& c : r.failures) f.push_back(Json{{"cell", c.index}, {"message", c.message}});
  return f;
}

struct FigureContext {
  const RunContext& run;
  double beta;
  double alpha;
  std::size_t curve_points;
  std::size_t map_points;
};

FigureContext figure_context(const RunContext& run) {
  const QkdScenario s = scenario_of(run.config);
  const auto& fig = run.config["figure"];
  const auto curve = fig["curve_points"].get<long long>();
  const auto map = fig["map_points"].get<long long>();
  if (curve < 2 || map < 2) throw ConfigError("figure.curve_points and figure.map_points must be at least 2");
  return {run, s.channel_a.beta, s.channel_a.alpha_db_per_km, std::size_t(curve), std::size_t(map)};
}

void figure3(const FigureContext& fc, const std::string& id, double l_b) {
  const double d_a = fc.beta * kKm;
  const double d_b = fc.beta * l_b;
  std::vector<SweepAxis> axes = {{"sigma", "s^-1", {1e10, 1e11, 1e12}},
                                 {"tau_p", "s", logspace(1e-14, 1e-9, fc.curve_points)}};
  const SweepResult r = sweep(
      [&](std::span<const double> c) { return tau_heralded(SourceParams{c[1], c[0]}, d_a, d_b); }, axes,
      {fc.run.threads});
  Table t;
  add_axis_columns(t, r);
  t.add("tau_Ah", "s", r.values);

  Json prov{{"figure", id}, {"L_A_m", kKm}, {"L_B_m", l_b}, {"failures", failures_json(r)}};
  Json regimes = Json::object();
  for (double sigma : r.axes[0].values) {
    const PumpOptimum p = optimal_pump_fixed_crystal(d_a, d_b, sigma);
    Json e{{"regime", std::string(to_string(p.kind))}, {"tau_Ah", *p.tau_ah_at_optimum}};
    if (p.tau_p_star) e["tau_p_star"] = *p.tau_p_star;
    regimes[format_number(sigma)] = e;
  }
  prov["pump_optimum_by_sigma"] = regimes;
  write_outputs(fc.run.out_dir, "fig" + id, t, fc.run.config, prov);
}

void figure4(const FigureContext& fc, const std::string& id, double l_b) {
  const double d_a = fc.beta * kKm;
  const double d_b = fc.beta * l_b;
  std::vector<SweepAxis> axes = {{"tau_p", "s", logspace(1e-14, 1e-9, fc.map_points)},
                                 {"sigma", "s^-1", logspace(1e9, 1e14, fc.map_points)}};
  const SweepResult r = sweep(
      [&](std::span<const double> c) { return tau_heralded(SourceParams{c[0], c[1]}, d_a, d_b); }, axes,
      {fc.run.threads});
  Table t;
  add_axis_columns(t, r);
  std::vector<double> logs(r.values.size());
  std::transform(r.values.begin(), r.values.end(), logs.begin(), [](double v) { return std::log10(v); });
  t.add("tau_Ah", "s", r.values);
  t.add("log10_tau_Ah", "", std::move(logs));
  const FullOptimum f = full_optimum_2d(d_a, d_b);
  Json prov{{"figure", id},
            {"L_A_m", kKm},
            {"L_B_m", l_b},
            {"full_optimum", {{"tau_p", f.tau_p_star}, {"sigma", f.sigma_star}, {"tau_Ah", f.tau_ah_star},
                              {"boundary_hit", f.boundary_hit}}},
            {"failures", failures_json(r)}};
  write_outputs(fc.run.out_dir, "fig" + id, t, fc.run.config, prov);
}

void figure5(const FigureContext& fc) {
  const double d_a = fc.beta * kKm;
  std::vector<SweepAxis> axes = {{"L_B", "m", logspace(10.0, 1e6, fc.map_points)},
                                 {"sigma", "s^-1", logspace(1e9, 1e14, fc.map_points)}};
  const std::size_t n = axes[0].values.size() * axes[1].values.size();
  std::vector<std::string> regime(n);
  std::vector<double> tau_p(n, std::numeric_limits<double>::quiet_NaN());
  const SweepResult r = sweep(
      [&](std::span<const double> c) {
        const PumpOptimum p = optimal_pump_fixed_crystal(d_a, fc.beta * c[0], c[1]);
        const std::size_t i = flat_index(axes, c);
        regime[i] = std::string(to_string(p.kind));
        if (p.tau_p_star) tau_p[i] = *p.tau_p_star;
        return *p.tau_ah_at_optimum;
      },
      axes, {fc.run.threads});
  Table t;
  add_axis_columns(t, r);
  t.add("tau_Ah_min", "s", r.values);
  t.add("tau_p_star", "s", std::move(tau_p));
  t.add_text("regime", std::move(regime));
  Json prov{{"figure", "5"}, {"L_A_m", kKm}, {"failures", failures_json(r)}};
  write_outputs(fc.run.out_dir, "fig5", t, fc.run.config, prov);
}

void figure6(const FigureContext& fc) {
  std::vector<SweepAxis> axes = {{"jitter", "s", {0.0, 10e-12, 100e-12}},
                                 {"L", "m", logspace(100.0, 3e5, fc.curve_points)}};
  const std::size_t n = axes[0].values.size() * axes[1].values.size();
  std::vector<double> tau_p(n), sigma(n);
  const SweepResult r = sweep(
      [&](std::span<const double> c) {
        const double d = fc.beta * c[1];
        const FullOptimum f = full_optimum_2d_jittered(d, d, c[0], c[0]);
        const std::size_t i = flat_index(axes, c);
        tau_p[i] = f.tau_p_star;
        sigma[i] = f.sigma_star;
        return f.tau_ah_star;
      },
      axes, {fc.run.threads});
  Table t;
  add_axis_columns(t, r);
  t.add("tau_Ah_J", "s", r.values);
  t.add("tau_p_opt", "s", std::move(tau_p));
  t.add("sigma_opt", "s^-1", std::move(sigma));
  Json prov{{"figure", "6"}, {"arms", "symmetric, L_A = L_B = L"}, {"failures", failures_json(r)}};
  write_outputs(fc.run.out_dir, "fig6", t, fc.run.config, prov);
}

void figure7(const FigureContext& fc) {
  const SellmeierSet set = sellmeier_of(fc.run.config);
  const SigmaOptions options = sigma_options_of(fc.run.config);
  const CrystalSpec base = crystal_of(fc.run.config);
  std::vector<SweepAxis> axes = {{"crystal_length", "m", {1e-3, 1e-2}},
                                 {"mode_width", "m", {1e-5, 1e-4, 1e-3}},
                                 {"alpha", "deg", linspace(0.0, 15.0, fc.curve_points)}};
  const SweepResult r = sweep(
      [&](std::span<const double> c) {
        CrystalSpec spec = base;
        spec.length = c[0];
        spec.mode_width = c[1];
        spec.emission_angle = c[2] * std::numbers::pi / 180.0;
        return effective_sigma(spec, options, set);
      },
      axes, {fc.run.threads});
  Table t;
  add_axis_columns(t, r);
  t.add("sigma", "s^-1", r.values);
  const double ref_1km = symmetric_full_optimum(fc.beta * kKm).sigma;
  const double ref_100km = symmetric_full_optimum(fc.beta * 100.0 * kKm).sigma;
  t.add("sigma_opt_1km", "s^-1", std::vector<double>(r.values.size(), ref_1km));
  t.add("sigma_opt_100km", "s^-1", std::vector<double>(r.values.size(), ref_100km));
  Json prov{{"figure", "7"},
            {"sellmeier", set.name},
            {"emission_angle", "internal angle of the signal photon"},
            {"failures", failures_json(r)}};
  write_outputs(fc.run.out_dir, "fig7", t, fc.run.config, prov);
}

LinkTemplate base_template(const FigureContext& fc) {
  LinkTemplate t = link_template_of(fc.run.config);
  t.policy = SourcePolicy::Fixed;
  return t;
}

void figure8a(const FigureContext& fc) {
  const LinkTemplate fixed = base_template(fc);
  LinkTemplate pump = fixed;
  pump.policy = SourcePolicy::PumpMatched;
  LinkTemplate full = fixed;
  full.policy = SourcePolicy::FullyMatched;
  LinkTemplate full_jitter = full;
  full_jitter.detector_a.jitter = 100e-12;
  full_jitter.detector_b.jitter = 100e-12;

  const std::vector<std::pair<std::string, LinkTemplate>> cases = {
      {"K_i", fixed}, {"K_ii", pump}, {"K_iii", full}, {"K_iii_jitter100ps", full_jitter}};
  const std::vector<double> lengths = linspace(0.0, 300.0 * kKm, fc.curve_points);
  Table t;
  t.add("L", "m", lengths);
  Json distances = Json::object();
  for (const auto& [name, link] : cases) {
    const KeyRateSweep k = keyrate_sweep(link, lengths, HeraldingLengthPolicy::Equal, 0.0, 3e5, fc.run.threads);
    t.add(name, "per pair", k.table.values);
    distances[name] = max_security_distance(link, VariedArm::Symmetric).length;
  }
  const double base = distances["K_i"].get<double>();
  Json prov{{"figure", "8a"},
            {"arms", "symmetric"},
            {"max_distance_m", distances},
            {"gain_ii_over_i", distances["K_ii"].get<double>() / base - 1.0},
            {"gain_iii_over_i", distances["K_iii"].get<double>() / base - 1.0},
            {"jitter_loss_m", distances["K_iii"].get<double>() - distances["K_iii_jitter100ps"].get<double>()}};
  write_outputs(fc.run.out_dir, "fig8a", t, fc.run.config, prov);
}

void figure8b(const FigureContext& fc) {
  LinkTemplate link = base_template(fc);
  link.policy = SourcePolicy::PumpOptimized;
  const std::vector<double> lengths = linspace(0.0, 350.0 * kKm, fc.curve_points);
  Table t;
  t.add("L_A", "m", lengths);
  Json distances = Json::object();
  for (double lb_km : {1.0, 25.0, 50.0, 100.0}) {
    const std::string name = "K_LB_" + format_number(lb_km) + "km";
    const KeyRateSweep k =
        keyrate_sweep(link, lengths, HeraldingLengthPolicy::Fixed, lb_km * kKm, 3e5, fc.run.threads);
    t.add(name, "per pair", k.table.values);
    try {
      distances[name] = max_security_distance(link, VariedArm::A, lb_km * kKm).length;
    } catch (const DomainError&) {
      distances[name] = nullptr; // no key even at L_A = 0
    }
  }
  const KeyRateSweep opt = keyrate_sweep(link, lengths, HeraldingLengthPolicy::Optimized, 0.0, 3e5, fc.run.threads);
  t.add("K_LB_opt", "per pair", opt.table.values);
  t.add("L_B_opt", "m", opt.length_b);
  Json prov{{"figure", "8b"}, {"source_policy", "pump-optimized"}, {"max_L_A_m", distances}};
  write_outputs(fc.run.out_dir, "fig8b", t, fc.run.config, prov);
}

} // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"3a", "3b", "4a", "4b", "5", "6", "7", "8a", "8b"};
  return ids;
}

void cmd_figure(const RunContext& ctx, const std::string& id) {
  const FigureContext fc = figure_context(ctx);
  if (id == "3a")
    figure3(fc, id, kKm);
  else if (id == "3b")
    figure3(fc, id, 100.0 * kKm);
  else if (id == "4a")
    figure4(fc, id, kKm);
  else if (id == "4b")
    figure4(fc, id, 100.0 * kKm);
  else if (id == "5")
    figure5(fc);
  else if (id == "6")
    figure6(fc);
  else if (id == "7")
    figure7(fc);
  else if (id == "8a")
    figure8a(fc);
  else if (id == "8b")
    figure8b(fc);
  else
    throw ConfigError("unknown figure id '" + id + "'");
  *ctx.out << "wrote " << (ctx.out_dir / ("fig" + id + ".csv")).string() << '\n';
}

} // namespace spdcopt::cli
