#include "spdcopt/qkd_security.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "spdcopt/analytic_optimizer.hpp"
#include "spdcopt/errors.hpp"

namespace spdcopt {
namespace {

void require_window(double xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("window factor must be positive");
}

bool near_edge(double x, double lo, double hi) {
  return x <= lo * (1.0 + 1e-6) || x >= hi * (1.0 - 1e-6);
}

} // namespace

void validate(const QkdScenario& scenario) {
  validate(scenario.source);
  validate(scenario.channel_a);
  validate(scenario.channel_b);
  validate(scenario.detector_a);
  validate(scenario.detector_b);
}

double transmittance(const ChannelParams& channel) {
  validate(channel);
  return std::pow(10.0, -channel.alpha_db_per_km * (channel.length / 1000.0) / 10.0);
}

double window_capture(double xi) {
  require_window(xi);
  return std::erf(xi / (2.0 * std::numbers::sqrt2));
}

DarkCountProbability dark_count_probability_checked(double xi, double tau, double dark_rate) {
  if (!(xi >= 0.0 && tau >= 0.0 && dark_rate >= 0.0))
    throw DomainError("dark-count probability needs non-negative arguments");
  const double p = 2.0 * dark_rate * xi * tau;
  if (p > 1.0) return {1.0, true};
  return {p, false};
}

double dark_count_probability(double xi, double tau, double dark_rate) {
  return dark_count_probability_checked(xi, tau, dark_rate).value;
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary entropy needs x in [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double bb84_error_threshold() {
  static const double q = bisect_zero_crossing(
      [](double x) { return 1.0 - 2.0 * binary_entropy(x); }, 0.01, 0.5, 1e-15);
  return q;
}

LinkWidths link_widths(const QkdScenario& scenario) {
  validate(scenario);
  const double d_a = accumulated_dispersion(scenario.channel_a);
  const double d_b = accumulated_dispersion(scenario.channel_b);
  const double j_a = scenario.detector_a.jitter;
  const double j_b = scenario.detector_b.jitter;
  LinkWidths w;
  w.tau_a = tau_unheralded_jittered(scenario.source, d_a, j_a);
  w.tau_ah = tau_heralded_jittered(scenario.source, d_a, d_b, j_a, j_b);
  w.tau_b = tau_unheralded_jittered(scenario.source, d_b, j_b);
  w.tau_bh = tau_heralded_jittered(scenario.source, d_b, d_a, j_b, j_a);
  return w;
}

AcceptanceTerms acceptance_terms(const QkdScenario& scenario, double xi_a, double xi_b) {
  require_window(xi_a);
  require_window(xi_b);
  const LinkWidths w = link_widths(scenario);
  const double da = scenario.detector_a.dark_rate;
  const double db = scenario.detector_b.dark_rate;
  const double arrive_a = transmittance(scenario.channel_a) * window_capture(xi_a);
  const double arrive_b = transmittance(scenario.channel_b) * window_capture(xi_b);
  const double p_ah = dark_count_probability(xi_a, w.tau_ah, da);
  const double p_bh = dark_count_probability(xi_b, w.tau_bh, db);
  const double p_a = dark_count_probability(xi_a, w.tau_a, da);

  AcceptanceTerms t;
  t.both_photons = arrive_a * arrive_b;
  t.a_photon_b_dark = arrive_a * (1.0 - arrive_b) * p_bh;
  t.a_dark_b_photon = (1.0 - arrive_a) * arrive_b * p_ah;
  t.both_dark = (1.0 - arrive_a) * (1.0 - arrive_b) * p_a * p_bh;
  return t;
}

double acceptance_probability(const QkdScenario& scenario, double xi_a, double xi_b) {
  return acceptance_terms(scenario, xi_a, xi_b).total();
}

namespace {

double qber_of(const AcceptanceTerms& t) {
  const double p = t.total();
  if (!(p > 0.0)) throw DomainError("QBER undefined: acceptance probability is zero");
  const double q = (p - t.both_photons) / (2.0 * p);
  return std::clamp(q, 0.0, 0.5);
}

} // namespace

double qber(const QkdScenario& scenario, double xi_a, double xi_b) {
  return qber_of(acceptance_terms(scenario, xi_a, xi_b));
}

QkdMetrics key_rate(const QkdScenario& scenario, double xi_a, double xi_b) {
  const AcceptanceTerms t = acceptance_terms(scenario, xi_a, xi_b);
  QkdMetrics m;
  m.xi_a = xi_a;
  m.xi_b = xi_b;
  m.p_exp = t.total();
  m.qber = qber_of(t);
  m.raw_bound = m.p_exp * (1.0 - 2.0 * binary_entropy(m.qber));
  m.key_rate = std::max(0.0, m.raw_bound);
  m.insecure = !(m.key_rate > 0.0);
  return m;
}

QkdMetrics optimize_windows(const QkdScenario& scenario, const WindowSearchOptions& options) {
  validate(scenario);
  if (!(options.lo > 0.0 && options.hi > options.lo && options.start >= options.lo &&
        options.start <= options.hi))
    throw DomainError("window search box must contain the starting point");
  if (options.refinement_rounds < 0 || options.max_rounds < options.refinement_rounds + 1)
    throw DomainError("window search needs max_rounds > refinement_rounds");

  auto bound = [&](double xa, double xb) { return key_rate(scenario, xa, xb).raw_bound; };
  double xa = options.start;
  double xb = options.start;
  double best = bound(xa, xb);

  for (int round = 0; round < options.max_rounds; ++round) {
    const double xa_prev = xa, xb_prev = xb;
    // Golden section cannot see a plateau's far end; the box edges are probed
    // explicitly and an equal bound at the upper edge wins (wider window).
    auto line = [&](auto&& along, double& x) {
      const ScalarMinimum m = minimize_scalar([&](double v) { return -along(v); },
                                              {options.lo, options.hi, options.rel_tol, 500});
      if (-m.f >= best) {
        best = -m.f;
        x = m.x;
      }
      const double at_hi = along(options.hi);
      if (at_hi >= best) {
        best = at_hi;
        x = options.hi;
      }
      const double at_lo = along(options.lo);
      if (at_lo > best) {
        best = at_lo;
        x = options.lo;
      }
    };
    line([&](double v) { return bound(v, xb); }, xa);
    line([&](double v) { return bound(xa, v); }, xb);
    const double change = std::abs(std::log(xa / xa_prev)) + std::abs(std::log(xb / xb_prev));
    if (round >= options.refinement_rounds && change < 10.0 * options.rel_tol) break;
  }

  QkdMetrics m = key_rate(scenario, xa, xb);
  m.boundary_hit = near_edge(xa, options.lo, options.hi) || near_edge(xb, options.lo, options.hi);
  return m;
}

std::string_view to_string(SourcePolicy policy) noexcept {
  switch (policy) {
  case SourcePolicy::Fixed: return "fixed";
  case SourcePolicy::PumpMatched: return "pump-matched";
  case SourcePolicy::FullyMatched: return "fully-matched";
  case SourcePolicy::PumpOptimized: return "pump-optimized";
  }
  return "unknown";
}

QkdScenario instantiate(const LinkTemplate& link, double length_a, double length_b) {
  if (!(length_a >= 0.0 && length_b >= 0.0)) throw DomainError("arm lengths must be non-negative");
  QkdScenario s;
  s.source = link.source;
  s.channel_a = {length_a, link.beta, link.alpha_db_per_km};
  s.channel_b = {length_b, link.beta, link.alpha_db_per_km};
  s.detector_a = link.detector_a;
  s.detector_b = link.detector_b;

  const double design_a = link.beta * std::max(length_a, 1.0);
  const double design_b = link.beta * std::max(length_b, 1.0);
  switch (link.policy) {
  case SourcePolicy::Fixed:
    break;
  case SourcePolicy::PumpMatched:
    if (design_a == 0.0) throw DomainError("pump matching needs a dispersive channel");
    s.source.tau_p = std::sqrt(2.0 * std::abs(design_a));
    break;
  case SourcePolicy::FullyMatched: {
    const SymmetricOptimum opt = symmetric_full_optimum(design_a);
    s.source.tau_p = opt.tau_p;
    s.source.sigma = opt.sigma;
    break;
  }
  case SourcePolicy::PumpOptimized: {
    const double sigma = link.source.sigma;
    const ScalarMinimum m = minimize_scalar(
        [&](double tp) { return tau_heralded(SourceParams{tp, sigma}, design_a, design_b); },
        {1e-15, 1e-6, 1e-8, 500});
    s.source.tau_p = m.x;
    break;
  }
  }
  validate(s);
  return s;
}

DistanceResult max_security_distance(const LinkTemplate& link, VariedArm arm, double other_length,
                                     const DistanceOptions& options) {
  if (!(options.tolerance > 0.0 && options.initial_upper > 0.0 &&
        options.max_length >= options.initial_upper))
    throw DomainError("invalid distance search options");
  auto scenario_at = [&](double length) {
    switch (arm) {
    case VariedArm::A: return instantiate(link, length, other_length);
    case VariedArm::B: return instantiate(link, other_length, length);
    case VariedArm::Symmetric: break;
    }
    return instantiate(link, length, length);
  };
  auto g = [&](double length) { return optimize_windows(scenario_at(length), link.windows).raw_bound; };

  if (!(g(0.0) > 0.0)) throw DomainError("link is insecure even at zero length of the varied arm");
  double lo = 0.0;
  double hi = options.initial_upper;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > options.max_length)
      throw DomainError("link stays secure beyond the maximum searched length");
  }
  const Bracket b = bisect_bracket(g, lo, hi, options.tolerance);
  DistanceResult out;
  out.length = b.lo;
  out.metrics = optimize_windows(scenario_at(b.lo), link.windows);
  return out;
}

KeyRateSweep keyrate_sweep(const LinkTemplate& link, std::vector<double> length_a,
                           HeraldingLengthPolicy policy, double fixed_length_b,
                           double max_length_b, unsigned threads) {
  if (policy == HeraldingLengthPolicy::Optimized && !(max_length_b > 1.0))
    throw DomainError("optimized heralding length needs max_length_b > 1 m");
  KeyRateSweep out;
  const std::size_t n = length_a.size();
  out.length_b.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.metrics.assign(n, QkdMetrics{});
  const std::vector<double> grid = length_a;

  auto evaluate = [&](std::span<const double> coords) {
    const double la = coords[0];
    const auto it = std::find(grid.begin(), grid.end(), la);
    const std::size_t idx = std::size_t(it - grid.begin());
    double lb = fixed_length_b;
    if (policy == HeraldingLengthPolicy::Equal) lb = la;
    if (policy == HeraldingLengthPolicy::Optimized) {
      const ScalarMinimum m = minimize_scalar(
          [&](double x) { return -optimize_windows(instantiate(link, la, x), link.windows).raw_bound; },
          {1.0, max_length_b, 1e-6, 500});
      lb = m.x;
    }
    const QkdMetrics metrics = optimize_windows(instantiate(link, la, lb), link.windows);
    out.length_b[idx] = lb;
    out.metrics[idx] = metrics;
    return metrics.key_rate;
  };
  out.table = sweep(evaluate, {SweepAxis{"L_A", "m", std::move(length_a)}}, SweepOptions{threads});
  out.table.metadata["beta"] = link.beta;
  out.table.metadata["alpha_db_per_km"] = link.alpha_db_per_km;
  out.table.metadata["sigma"] = link.source.sigma;
  out.table.metadata["tau_p"] = link.source.tau_p;
  out.table.metadata["dark_rate_a"] = link.detector_a.dark_rate;
  out.table.metadata["dark_rate_b"] = link.detector_b.dark_rate;
  out.table.metadata["jitter_a"] = link.detector_a.jitter;
  out.table.metadata["jitter_b"] = link.detector_b.jitter;
  return out;
}

} // namespace spdcopt
