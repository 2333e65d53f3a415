#include "spdcopt/numeric_optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "spdcopt/errors.hpp"
#include "spdcopt/temporal_model.hpp"

namespace spdcopt {
namespace {

constexpr double kInvPhi = 0.6180339887498948482; // (sqrt(5) - 1) / 2

void validate(const ScalarSearchSpec& spec) {
  if (!(spec.lo > 0.0) || !(spec.hi > spec.lo) || !std::isfinite(spec.hi))
    throw DomainError("search bracket must satisfy 0 < lo < hi");
  if (!(spec.rel_tol > 0.0 && spec.rel_tol < 1.0))
    throw DomainError("rel_tol must lie in (0, 1)");
  if (spec.max_iter < 1) throw DomainError("max_iter must be at least 1");
}

void validate(const LogBox& box) {
  if (!(box.x_lo > 0.0 && box.x_hi > box.x_lo && box.y_lo > 0.0 && box.y_hi > box.y_lo))
    throw DomainError("log box must have positive, increasing bounds");
}

// Treats NaN as +inf so a failed evaluation never wins a comparison.
double finite_or_inf(double v) {
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

} // namespace

ScalarMinimum minimize_scalar(const std::function<double(double)>& f,
                              const ScalarSearchSpec& spec) {
  validate(spec);
  const double log_lo = std::log(spec.lo);
  const double log_hi = std::log(spec.hi);
  auto eval = [&](double u) { return finite_or_inf(f(std::exp(u))); };

  double a = log_lo;
  double b = log_hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval(c);
  double fd = eval(d);

  int iter = 0;
  for (; b - a > spec.rel_tol; ++iter) {
    if (iter >= spec.max_iter) {
      const bool left = fc <= fd;
      throw ConvergenceError("golden-section search did not converge",
                             std::exp(left ? c : d), left ? fc : fd);
    }
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }

  ScalarMinimum out;
  out.iterations = iter;
  out.x = std::exp(0.5 * (a + b));
  out.f = eval(0.5 * (a + b));

  // A bracket end that never moved means the minimizer is at (or beyond)
  // that end of the search interval.
  if (a == log_lo) {
    out.boundary_hit = true;
    const double f_lo = finite_or_inf(f(spec.lo));
    if (f_lo <= out.f) {
      out.x = spec.lo;
      out.f = f_lo;
    }
  } else if (b == log_hi) {
    out.boundary_hit = true;
    const double f_hi = finite_or_inf(f(spec.hi));
    if (f_hi <= out.f) {
      out.x = spec.hi;
      out.f = f_hi;
    }
  }
  return out;
}

Minimum2d minimize_log_2d(const std::function<double(double, double)>& f,
                          const LogBox& box, const Optimize2dOptions& options) {
  validate(box);
  if (options.coarse_points < 2) throw DomainError("coarse scan needs at least 2 points");

  const auto xs = logspace(box.x_lo, box.x_hi, options.coarse_points);
  const auto ys = logspace(box.y_lo, box.y_hi, options.coarse_points);
  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double v = finite_or_inf(f(xs[i], ys[j]));
      if (v < best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  }
  if (!std::isfinite(best)) throw DomainError("objective is not finite anywhere on the coarse grid");

  Minimum2d out;
  out.coarse_f = best;
  out.x = xs[bi];
  out.y = ys[bj];
  out.f = best;

  // Line searches start two coarse cells either side of the current point and
  // widen while the minimizer keeps landing on an interior bracket end.
  const double x_step = std::pow(box.x_hi / box.x_lo, 2.0 / double(options.coarse_points - 1));
  const double y_step = std::pow(box.y_hi / box.y_lo, 2.0 / double(options.coarse_points - 1));
  const double line_tol = std::min(options.rel_tol, 1e-10);

  auto line_search = [&](const std::function<double(double)>& g, double at, double step,
                         double lo_limit, double hi_limit) {
    double lo = std::max(lo_limit, at / step);
    double hi = std::min(hi_limit, at * step);
    for (;;) {
      ScalarMinimum m = minimize_scalar(g, {lo, hi, line_tol, 500});
      const bool grow_lo = m.boundary_hit && m.x <= lo * (1.0 + 1e-9) && lo > lo_limit;
      const bool grow_hi = m.boundary_hit && m.x >= hi * (1.0 - 1e-9) && hi < hi_limit;
      if (!grow_lo && !grow_hi) return m;
      if (grow_lo) lo = std::max(lo_limit, lo / (step * step));
      if (grow_hi) hi = std::min(hi_limit, hi * step * step);
    }
  };

  for (out.rounds = 1; out.rounds <= options.max_rounds; ++out.rounds) {
    const double x_prev = out.x, y_prev = out.y, f_prev = out.f;
    const double y_now = out.y;
    ScalarMinimum mx = line_search([&](double x) { return f(x, y_now); }, out.x, x_step,
                                   box.x_lo, box.x_hi);
    if (mx.f <= out.f) {
      out.x = mx.x;
      out.f = mx.f;
    }
    const double x_now = out.x;
    ScalarMinimum my = line_search([&](double y) { return f(x_now, y); }, out.y, y_step,
                                   box.y_lo, box.y_hi);
    if (my.f <= out.f) {
      out.y = my.x;
      out.f = my.f;
    }
    const double change = std::abs(std::log(out.x / x_prev)) + std::abs(std::log(out.y / y_prev));
    const bool stalled = !(out.f < f_prev * (1.0 - 1e-15));
    if (change < options.rel_tol || (stalled && out.rounds > 1)) {
      out.converged = true;
      break;
    }
  }
  if (out.rounds > options.max_rounds) out.rounds = options.max_rounds;

  auto at_edge = [](double v, double lo, double hi) {
    return v <= lo * (1.0 + 1e-6) || v >= hi * (1.0 - 1e-6);
  };
  out.boundary_hit = at_edge(out.x, box.x_lo, box.x_hi) || at_edge(out.y, box.y_lo, box.y_hi);
  return out;
}

LogBox default_source_box() noexcept { return {1e-15, 1e-6, 1e8, 1e14}; }

FullOptimum full_optimum_2d_jittered(double d_a, double d_b, double jitter_a, double jitter_b,
                                     const Optimize2dOptions& options) {
  if (d_a == 0.0 || d_b == 0.0)
    throw DomainError("full source optimization requires nonzero dispersion in both arms");
  auto objective = [&](double tau_p, double sigma) {
    return tau_heralded_jittered(SourceParams{tau_p, sigma}, d_a, d_b, jitter_a, jitter_b);
  };
  FullOptimum out;
  out.search = minimize_log_2d(objective, default_source_box(), options);
  out.tau_p_star = out.search.x;
  out.sigma_star = out.search.y;
  out.tau_ah_star = out.search.f;
  out.boundary_hit = out.search.boundary_hit;
  return out;
}

FullOptimum full_optimum_2d(double d_a, double d_b, const Optimize2dOptions& options) {
  return full_optimum_2d_jittered(d_a, d_b, 0.0, 0.0, options);
}

std::size_t SweepResult::cell_count() const noexcept {
  std::size_t n = axes.empty() ? 0 : 1;
  for (const auto& axis : axes) n *= axis.values.size();
  return n;
}

std::vector<double> SweepResult::coordinates(std::size_t index) const {
  std::vector<double> coords(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    const std::size_t len = axes[k].values.size();
    coords[k] = axes[k].values[index % len];
    index /= len;
  }
  return coords;
}

SweepResult sweep(const SweepFunction& f, std::vector<SweepAxis> axes,
                  const SweepOptions& options) {
  if (axes.empty()) throw DomainError("sweep needs at least one axis");
  for (const auto& axis : axes) {
    if (axis.values.empty()) throw DomainError("sweep axis '" + axis.name + "' is empty");
    for (double v : axis.values)
      if (!std::isfinite(v)) throw DomainError("sweep axis '" + axis.name + "' has non-finite values");
    for (std::size_t i = 1; i < axis.values.size(); ++i)
      if (!(axis.values[i] > axis.values[i - 1]) && !(axis.values[i] < axis.values[i - 1]))
        throw DomainError("sweep axis '" + axis.name + "' is not strictly monotone");
  }

  SweepResult out;
  out.axes = std::move(axes);
  const std::size_t n = out.cell_count();
  out.values.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(n);

  auto evaluate = [&](std::size_t i) {
    try {
      const auto coords = out.coordinates(i);
      const double v = f(coords);
      if (std::isfinite(v))
        out.values[i] = v;
      else
        errors[i] = "non-finite value";
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, unsigned(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) evaluate(i);
      });
  }

  for (std::size_t i = 0; i < n; ++i)
    if (!errors[i].empty()) out.failures.push_back({i, std::move(errors[i])});
  return out;
}

Bracket bisect_bracket(const std::function<double(double)>& g, double lo, double hi,
                       double tol, int max_iter) {
  if (!(hi > lo)) throw DomainError("bisection needs lo < hi");
  if (!(tol > 0.0)) throw DomainError("bisection tolerance must be positive");
  const double g_lo = g(lo);
  const double g_hi = g(hi);
  if (g_lo == 0.0) return {lo, lo};
  if (g_hi == 0.0) return {hi, hi};
  if (!(std::signbit(g_lo) != std::signbit(g_hi)) || std::isnan(g_lo) || std::isnan(g_hi))
    throw DomainError("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "]; widen the bracket");
  const bool lo_negative = std::signbit(g_lo);
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = g(mid);
    if (g_mid == 0.0) return {mid, mid};
    if (std::signbit(g_mid) == lo_negative)
      lo = mid;
    else
      hi = mid;
  }
  if (hi - lo > tol) throw ConvergenceError("bisection did not reach tolerance", 0.5 * (lo + hi), 0.0);
  return {lo, hi};
}

double bisect_zero_crossing(const std::function<double(double)>& g, double lo, double hi,
                            double tol) {
  const Bracket b = bisect_bracket(g, lo, hi, tol);
  return 0.5 * (b.lo + b.hi);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double step = (hi - lo) / double(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * double(i);
  out.back() = hi;
  return out;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > 0.0)) throw DomainError("logspace bounds must be positive");
  auto exps = linspace(std::log(lo), std::log(hi), n);
  for (double& e : exps) e = std::exp(e);
  if (n > 0) {
    exps.front() = lo;
    exps.back() = hi;
  }
  return exps;
}

} // namespace spdcopt
