#include "spdcopt/oracle_fft.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include <fftw3.h>

#include "spdcopt/errors.hpp"

namespace spdcopt::oracle {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double sq(double x) { return x * x; }

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plan {
public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (plan_ == nullptr) throw std::runtime_error("FFTW could not create a plan");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

private:
  fftw_plan plan_;
};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double centered(std::size_t i, std::size_t n, double step) {
  return (double(i) - double(n / 2)) * step;
}

double sign_flip(std::size_t i) { return (i % 2 == 0) ? 1.0 : -1.0; }

void check_border(const JointIntensity& ji, const char* what) {
  const std::size_t na = ji.t_a.size(), nb = ji.t_b.size();
  const double peak = *std::max_element(ji.intensity.begin(), ji.intensity.end());
  double border = 0.0;
  for (std::size_t i = 0; i < na; ++i) border = std::max({border, ji.at(i, 0), ji.at(i, nb - 1)});
  for (std::size_t j = 0; j < nb; ++j) border = std::max({border, ji.at(0, j), ji.at(na - 1, j)});
  if (border > 1e-12 * peak)
    throw DomainError(std::string(what) + ": intensity at the grid border is " +
                      std::to_string(border / peak) +
                      " of the peak; aliasing likely, increase the span or the number of points");
}

void normalize(std::vector<double>& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (!(total > 0.0)) throw DomainError("joint intensity has zero total mass");
  for (double& x : v) x /= total;
}

struct Moments {
  double mass = 0.0;
  double mean = 0.0;
  double var = 0.0;
};

template <class Weight>
Moments moments(std::size_t n, Weight&& w, const std::vector<double>& x) {
  Moments m;
  for (std::size_t i = 0; i < n; ++i) {
    m.mass += w(i);
    m.mean += w(i) * x[i];
  }
  if (!(m.mass > 0.0)) return m;
  m.mean /= m.mass;
  for (std::size_t i = 0; i < n; ++i) m.var += w(i) * sq(x[i] - m.mean);
  m.var /= m.mass;
  return m;
}

} // namespace

void validate(const GridSpec& grid) {
  if (grid.n_points < 256)
    throw DomainError("grid of " + std::to_string(grid.n_points) +
                      " points per axis is below the 256-point minimum; aliasing cannot be excluded");
  if (!is_power_of_two(grid.n_points))
    throw DomainError("grid size must be a power of two, got " + std::to_string(grid.n_points));
  if (!(grid.span_a > 0.0 && grid.span_b > 0.0) || !std::isfinite(grid.span_a) ||
      !std::isfinite(grid.span_b))
    throw DomainError("grid spans must be positive");
}

GridSpec default_grid(const SourceParams& source, double d_a, double d_b, std::size_t n_points) {
  validate(source);
  // Heralded width from the inverse of the spectral quadratic form; only the
  // time step depends on it, the widths themselves still come from the FFT.
  const double s2 = 1.0 / sq(source.sigma);
  const double p2 = sq(source.tau_p) / 4.0;
  const std::complex<double> m11(s2 + p2, -d_a), m22(s2 + p2, -d_b), m12(p2 - s2, 0.0);
  const double heralded = 1.0 / std::sqrt((m22 / (m11 * m22 - m12 * m12)).real());
  // Cover 12 amplitude widths, and keep at least 6 time steps per heralded width.
  const double width = std::max(source.sigma / std::numbers::sqrt2, std::numbers::sqrt2 / source.tau_p);
  const double span = std::max(12.0 * width, 12.0 * kPi / heralded);
  return {n_points, span, span};
}

JointIntensity joint_temporal_intensity(const SourceParams& source, double d_a, double d_b,
                                        const GridSpec& grid) {
  validate(source);
  validate(grid);
  const std::size_t n = grid.n_points;
  const double dnu_a = grid.span_a / double(n);
  const double dnu_b = grid.span_b / double(n);

  auto buf = fftw_buffer<fftw_complex>(n * n);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(fftw_plan_dft_2d(int(n), int(n), buf.get(), buf.get(),
                                                   FFTW_BACKWARD, FFTW_ESTIMATE));
  }
  const double tp2 = sq(source.tau_p);
  const double s2 = sq(source.sigma);
  double max_step = 0.0; // largest phase increment between samples with non-negligible amplitude
  for (std::size_t i = 0; i < n; ++i) {
    const double na = centered(i, n, dnu_a);
    for (std::size_t j = 0; j < n; ++j) {
      const double nb = centered(j, n, dnu_b);
      const double envelope = std::exp(-sq(na - nb) / s2 - sq(na + nb) * tp2 / 4.0);
      if (envelope > 1e-8)
        max_step = std::max({max_step, std::abs(2.0 * d_a * na * dnu_a),
                             std::abs(2.0 * d_b * nb * dnu_b)});
      const double amp = envelope * sign_flip(i + j);
      const double phase = d_a * na * na + d_b * nb * nb;
      buf[i * n + j][0] = amp * std::cos(phase);
      buf[i * n + j][1] = amp * std::sin(phase);
    }
  }
  if (max_step >= kPi)
    throw DomainError("spectral phase is under-sampled where the amplitude is significant; "
                      "aliasing likely, increase the number of points or reduce the span");
  plan->execute();

  JointIntensity ji;
  ji.t_a.resize(n);
  ji.t_b.resize(n);
  const double dt_a = 2.0 * kPi / grid.span_a;
  const double dt_b = 2.0 * kPi / grid.span_b;
  for (std::size_t i = 0; i < n; ++i) {
    ji.t_a[i] = centered(i, n, dt_a);
    ji.t_b[i] = centered(i, n, dt_b);
  }
  ji.intensity.resize(n * n);
  for (std::size_t k = 0; k < n * n; ++k) ji.intensity[k] = sq(buf[k][0]) + sq(buf[k][1]);
  normalize(ji.intensity);
  check_border(ji, "joint temporal intensity");
  return ji;
}

EmpiricalWidths empirical_widths(const JointIntensity& ji) {
  const std::size_t na = ji.t_a.size(), nb = ji.t_b.size();
  if (na < 3 || nb < 3 || ji.intensity.size() != na * nb)
    throw DomainError("joint intensity has inconsistent dimensions");
  double total = 0.0;
  for (double v : ji.intensity) {
    if (!(v >= 0.0)) throw DomainError("joint intensity must be non-negative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("joint intensity is not normalized");

  std::vector<double> marg_a(na, 0.0), marg_b(nb, 0.0);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      marg_a[i] += ji.at(i, j);
      marg_b[j] += ji.at(i, j);
    }
  const Moments ma = moments(na, [&](std::size_t i) { return marg_a[i]; }, ji.t_a);
  const Moments mb = moments(nb, [&](std::size_t j) { return marg_b[j]; }, ji.t_b);

  EmpiricalWidths out;
  out.tau_a = std::sqrt(ma.var);

  const std::size_t peak = std::size_t(std::max_element(marg_b.begin(), marg_b.end()) - marg_b.begin());
  const double dt_b = ji.t_b[1] - ji.t_b[0];
  const double dt_a = ji.t_a[1] - ji.t_a[0];
  const auto offset = std::ptrdiff_t(std::lround(std::sqrt(mb.var) / dt_b));
  const double peak_mass = marg_b[peak];

  for (std::ptrdiff_t k : {std::ptrdiff_t(0), offset, -offset}) {
    const std::ptrdiff_t j = std::ptrdiff_t(peak) + k;
    if (j < 0 || j >= std::ptrdiff_t(nb)) {
      out.warnings.push_back("slice outside the grid skipped");
      continue;
    }
    const auto col = std::size_t(j);
    if (marg_b[col] < 1e-6 * peak_mass) {
      out.warnings.push_back("slice at t_B=" + std::to_string(ji.t_b[col]) +
                             " s skipped: mass below 1e-6 of the peak slice");
      continue;
    }
    const Moments m = moments(na, [&](std::size_t i) { return ji.at(i, col); }, ji.t_a);
    out.slice_times.push_back(ji.t_b[col]);
    out.slice_widths.push_back(std::sqrt(m.var));
  }
  if (out.slice_widths.empty()) throw DomainError("no conditional slice carried enough mass");

  out.tau_ah = std::accumulate(out.slice_widths.begin(), out.slice_widths.end(), 0.0) /
               double(out.slice_widths.size());
  if (out.tau_ah < 4.0 * dt_a)
    throw DomainError("conditional width spans fewer than 4 grid steps; refine the time grid");
  for (double a : out.slice_widths)
    for (double b : out.slice_widths)
      out.max_slice_disagreement = std::max(out.max_slice_disagreement, std::abs(a - b) / out.tau_ah);
  if (out.max_slice_disagreement > 1e-3)
    throw ConsistencyError("conditional widths differ between heralding times by " +
                           std::to_string(out.max_slice_disagreement));
  return out;
}

JointIntensity convolve_jitter(const JointIntensity& ji, double jitter_a, double jitter_b) {
  if (!(jitter_a >= 0.0 && jitter_b >= 0.0)) throw DomainError("jitter must be non-negative");
  const std::size_t na = ji.t_a.size(), nb = ji.t_b.size();
  if (na < 2 || nb < 2 || ji.intensity.size() != na * nb)
    throw DomainError("joint intensity has inconsistent dimensions");
  const std::size_t nbh = nb / 2 + 1;
  auto real = fftw_buffer<double>(na * nb);
  auto spec = fftw_buffer<fftw_complex>(na * nbh);
  std::unique_ptr<Plan> forward, backward;
  {
    std::lock_guard lock(planner_mutex());
    forward = std::make_unique<Plan>(
        fftw_plan_dft_r2c_2d(int(na), int(nb), real.get(), spec.get(), FFTW_ESTIMATE));
    backward = std::make_unique<Plan>(
        fftw_plan_dft_c2r_2d(int(na), int(nb), spec.get(), real.get(), FFTW_ESTIMATE));
  }
  std::copy(ji.intensity.begin(), ji.intensity.end(), real.get());
  forward->execute();

  const double dt_a = ji.t_a[1] - ji.t_a[0];
  const double dt_b = ji.t_b[1] - ji.t_b[0];
  auto angular = [](std::size_t k, std::size_t n, double dt) {
    const double kk = k <= n / 2 ? double(k) : double(k) - double(n);
    return 2.0 * kPi * kk / (double(n) * dt);
  };
  for (std::size_t i = 0; i < na; ++i) {
    const double wa = angular(i, na, dt_a);
    for (std::size_t j = 0; j < nbh; ++j) {
      const double wb = angular(j, nb, dt_b);
      const double h = std::exp(-0.5 * (sq(jitter_a * wa) + sq(jitter_b * wb)));
      spec[i * nbh + j][0] *= h;
      spec[i * nbh + j][1] *= h;
    }
  }
  backward->execute();

  JointIntensity out;
  out.t_a = ji.t_a;
  out.t_b = ji.t_b;
  out.intensity.resize(na * nb);
  for (std::size_t k = 0; k < na * nb; ++k) out.intensity[k] = std::max(0.0, real[k]);
  normalize(out.intensity);
  check_border(out, "jitter-convolved intensity");
  return out;
}

namespace {

// Density |g(s)|^2 of g(s) = int exp(-(1 - i c) w^2 + i w s) dw, tabulated on
// a uniform grid in y with s = scale * y.
struct ChirpFactor {
  std::vector<double> rho;
  double y0 = 0.0;
  double dy = 0.0;
  double scale = 1.0;
  double var_s = 0.0;

  double half_range_s() const { return std::abs(scale) * (double(rho.size() / 2) - 3.0) * dy; }

  // Four-point Lagrange interpolation; zero outside the table.
  double operator()(double s) const {
    const double u = (s / scale - y0) / dy;
    const double fl = std::floor(u);
    if (!(fl >= 1.0 && fl <= double(rho.size()) - 3.0)) return 0.0;
    const auto i = std::size_t(fl);
    const double x = u - fl;
    const double p0 = rho[i - 1], p1 = rho[i], p2 = rho[i + 1], p3 = rho[i + 2];
    return p0 * (-x * (x - 1.0) * (x - 2.0) / 6.0) + p1 * ((x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0) +
           p2 * (-(x + 1.0) * x * (x - 2.0) / 2.0) + p3 * ((x + 1.0) * x * (x - 1.0) / 6.0);
  }
};

ChirpFactor chirp_factor(double c) {
  constexpr std::size_t n = 8192;
  auto buf = fftw_buffer<fftw_complex>(n);
  std::unique_ptr<Plan> fwd, bwd;
  {
    std::lock_guard lock(planner_mutex());
    fwd = std::make_unique<Plan>(fftw_plan_dft_1d(int(n), buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE));
    bwd = std::make_unique<Plan>(fftw_plan_dft_1d(int(n), buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
  }
  ChirpFactor f;
  f.rho.resize(n);

  if (std::abs(c) <= 1.0) {
    // Direct transform: the chirp exp(i c w^2) is slow enough to sample.
    const double ds = 0.01;
    const double dw = 2.0 * kPi / (double(n) * ds);
    for (std::size_t j = 0; j < n; ++j) {
      const double w = centered(j, n, dw);
      const double a = std::exp(-w * w) * sign_flip(j);
      buf[j][0] = a * std::cos(c * w * w);
      buf[j][1] = a * std::sin(c * w * w);
    }
    bwd->execute();
    f.dy = ds;
    f.scale = 1.0;
  } else {
    // Fresnel route: g(s) is, up to a phase, the convolution of exp(-w^2)
    // with exp(i c w^2) at y = -s / (2c). Transform the Gaussian, apply the
    // chirp's transfer function exp(-i tau^2 / (4c)), and transform back.
    const double dtau = 0.1;
    const double dw = 2.0 * kPi / (double(n) * dtau);
    for (std::size_t j = 0; j < n; ++j) {
      const double w = centered(j, n, dw);
      buf[j][0] = std::exp(-w * w) * sign_flip(j);
      buf[j][1] = 0.0;
    }
    fwd->execute();
    for (std::size_t m = 0; m < n; ++m) {
      const double tau = centered(m, n, dtau);
      const std::complex<double> g0(buf[m][0] * sign_flip(m), buf[m][1] * sign_flip(m));
      const std::complex<double> h = g0 * std::polar(1.0, -tau * tau / (4.0 * c)) * sign_flip(m);
      buf[m][0] = h.real();
      buf[m][1] = h.imag();
    }
    bwd->execute();
    f.dy = dw;
    f.scale = -2.0 * c;
  }
  f.y0 = centered(0, n, f.dy);
  for (std::size_t m = 0; m < n; ++m) f.rho[m] = sq(buf[m][0]) + sq(buf[m][1]);
  const double peak = *std::max_element(f.rho.begin(), f.rho.end());
  for (double& r : f.rho) r /= peak;
  if (std::max(f.rho.front(), f.rho.back()) > 1e-12)
    throw DomainError("chirped factor does not decay inside its table; aliasing likely");

  std::vector<double> y(n);
  for (std::size_t m = 0; m < n; ++m) y[m] = centered(m, n, f.dy);
  const Moments mom = moments(n, [&](std::size_t m) { return f.rho[m]; }, y);
  f.var_s = sq(f.scale) * mom.var;
  return f;
}

struct SliceResult {
  double mass = 0.0;
  double width = 0.0;
};

} // namespace

EmpiricalWidths frame_oracle_widths(const SourceParams& source, double d_a, double d_b) {
  validate(source);
  if (!std::isfinite(d_a) || !std::isfinite(d_b)) throw DomainError("dispersions must be finite");
  const double r2 = std::numbers::sqrt2;
  const double sp = r2 / source.tau_p; // whitening scale along (1, 1)/sqrt(2)
  const double sm = source.sigma / r2; // whitening scale along (1, -1)/sqrt(2)

  // Dispersion in whitened coordinates, then its eigen-rotation.
  const double a = 0.5 * (d_a + d_b) * sp * sp;
  const double b = 0.5 * (d_a - d_b) * sp * sm;
  const double d = 0.5 * (d_a + d_b) * sm * sm;
  const double theta = 0.5 * std::atan2(2.0 * b, a - d);
  const double cs = std::cos(theta), sn = std::sin(theta);
  const std::array<double, 2> chirp = {a * cs * cs + 2.0 * b * sn * cs + d * sn * sn,
                                       a * sn * sn - 2.0 * b * sn * cs + d * cs * cs};
  const double rot[2][2] = {{cs, -sn}, {sn, cs}};

  // nu = B u with B = E diag(sp, sm) R, and t = M s with M = E diag(1/sp, 1/sm) R.
  const double e[2][2] = {{1.0 / r2, 1.0 / r2}, {1.0 / r2, -1.0 / r2}};
  double B[2][2], M[2][2];
  for (int r = 0; r < 2; ++r)
    for (int k = 0; k < 2; ++k) {
      B[r][k] = e[r][0] * sp * rot[0][k] + e[r][1] * sm * rot[1][k];
      M[r][k] = e[r][0] / sp * rot[0][k] + e[r][1] / sm * rot[1][k];
    }

  const std::array<ChirpFactor, 2> factor = {chirp_factor(chirp[0]), chirp_factor(chirp[1])};

  EmpiricalWidths out;
  out.tau_a = std::sqrt(sq(M[0][0]) * factor[0].var_s + sq(M[0][1]) * factor[1].var_s);
  const double sd_b = std::sqrt(sq(M[1][0]) * factor[0].var_s + sq(M[1][1]) * factor[1].var_s);

  // Conditional density of t_A along s_k = B[0][k] t + B[1][k] T.
  auto slice = [&](double T) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 2; ++k) {
      if (B[0][k] == 0.0) continue;
      const double range = factor[std::size_t(k)].half_range_s();
      double t1 = (-range - B[1][k] * T) / B[0][k];
      double t2 = (range - B[1][k] * T) / B[0][k];
      if (t1 > t2) std::swap(t1, t2);
      lo = std::max(lo, t1);
      hi = std::min(hi, t2);
    }
    if (!(hi > lo) || !std::isfinite(hi - lo)) return SliceResult{};
    constexpr std::size_t n = 8001;
    std::vector<double> t(n), w(n);
    auto sample = [&](double from, double to) {
      const double step = (to - from) / double(n - 1);
      for (std::size_t i = 0; i < n; ++i) {
        t[i] = from + step * double(i);
        w[i] = factor[0](B[0][0] * t[i] + B[1][0] * T) * factor[1](B[0][1] * t[i] + B[1][1] * T);
      }
      Moments m = moments(n, [&](std::size_t i) { return w[i]; }, t);
      m.mass *= step;
      return m;
    };
    Moments m = sample(lo, hi);
    if (!(m.mass > 0.0)) return SliceResult{};
    const double sd = std::sqrt(m.var);
    m = sample(std::max(lo, m.mean - 14.0 * sd), std::min(hi, m.mean + 14.0 * sd));
    return SliceResult{m.mass, std::sqrt(m.var)};
  };

  const SliceResult centre = slice(0.0);
  if (!(centre.mass > 0.0)) throw DomainError("central heralding slice carries no mass");
  for (double T : {0.0, sd_b, -sd_b}) {
    const SliceResult s = T == 0.0 ? centre : slice(T);
    if (s.mass < 1e-6 * centre.mass) {
      out.warnings.push_back("slice at t_B=" + std::to_string(T) +
                             " s skipped: mass below 1e-6 of the central slice");
      continue;
    }
    out.slice_times.push_back(T);
    out.slice_widths.push_back(s.width);
  }
  out.tau_ah = std::accumulate(out.slice_widths.begin(), out.slice_widths.end(), 0.0) /
               double(out.slice_widths.size());
  for (double x : out.slice_widths)
    for (double y : out.slice_widths)
      out.max_slice_disagreement = std::max(out.max_slice_disagreement, std::abs(x - y) / out.tau_ah);
  if (out.max_slice_disagreement > 1e-3)
    throw ConsistencyError("conditional widths differ between heralding times by " +
                           std::to_string(out.max_slice_disagreement));
  return out;
}

} // namespace spdcopt::oracle
