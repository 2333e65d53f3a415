#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace spdcopt {

/// Bracket and stopping rule for a one-dimensional search. The bracket is
/// searched in log space, so both ends must be positive.
struct ScalarSearchSpec {
  double lo = 0.0;
  double hi = 0.0;
  double rel_tol = 1e-8;
  int max_iter = 500;
};

struct ScalarMinimum {
  double x = 0.0;
  double f = 0.0;
  bool boundary_hit = false; ///< minimizer sits on an end of the bracket
  int iterations = 0;
};

/// Golden-section search on log(x). For a unimodal objective the returned
/// x is within rel_tol * x of the true minimizer. Throws ConvergenceError
/// (carrying the best iterate) when max_iter is exhausted.
ScalarMinimum minimize_scalar(const std::function<double(double)>& f,
                              const ScalarSearchSpec& spec);

struct LogBox {
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
};

struct Optimize2dOptions {
  std::size_t coarse_points = 64; ///< per axis, log-spaced
  double rel_tol = 1e-8;          ///< joint relative change that ends refinement
  int max_rounds = 400;
};

struct Minimum2d {
  double x = 0.0;
  double y = 0.0;
  double f = 0.0;
  double coarse_f = 0.0; ///< best value found by the coarse scan
  bool boundary_hit = false;
  bool converged = false;
  int rounds = 0;
};

/// Coarse log-grid scan followed by coordinate descent (alternating
/// minimize_scalar along each axis). The result never exceeds the coarse
/// minimum.
Minimum2d minimize_log_2d(const std::function<double(double, double)>& f,
                          const LogBox& box, const Optimize2dOptions& options = {});

struct FullOptimum {
  double tau_p_star = 0.0;
  double sigma_star = 0.0;
  double tau_ah_star = 0.0;
  bool boundary_hit = false;
  Minimum2d search;
};

/// Search box used by full_optimum_2d: tau_p in [1e-15, 1e-6] s,
/// sigma in [1e8, 1e14] s^-1.
LogBox default_source_box() noexcept;

/// Joint numeric optimum of the heralded width of photon A over (tau_p, sigma).
FullOptimum full_optimum_2d(double d_a, double d_b, const Optimize2dOptions& options = {});

/// Same search with detector jitter included in the objective.
FullOptimum full_optimum_2d_jittered(double d_a, double d_b, double jitter_a,
                                     double jitter_b, const Optimize2dOptions& options = {});

struct SweepAxis {
  std::string name;
  std::string unit;
  std::vector<double> values;
};

struct CellFailure {
  std::size_t index = 0;
  std::string message;
};

/// Values of an objective on the Cartesian product of the axes, stored
/// row-major in axis declaration order (the last axis varies fastest).
struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<double> values;
  std::vector<CellFailure> failures;
  std::map<std::string, double> metadata;

  std::size_t cell_count() const noexcept;
  /// Grid coordinates of a flat cell index.
  std::vector<double> coordinates(std::size_t index) const;
};

struct SweepOptions {
  unsigned threads = 1;
};

using SweepFunction = std::function<double(std::span<const double>)>;

/// Evaluate `f` on every grid cell. A cell that throws or returns a
/// non-finite value is stored as NaN and listed in `failures`; the result
/// is identical for any thread count.
SweepResult sweep(const SweepFunction& f, std::vector<SweepAxis> axes,
                  const SweepOptions& options = {});

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Bisection keeping a sign change between the returned ends. `lo` keeps
/// the sign g had at the original lower end. Throws DomainError if g does
/// not change sign on [lo, hi].
Bracket bisect_bracket(const std::function<double(double)>& g, double lo, double hi,
                       double tol, int max_iter = 200);

/// Midpoint of the final bisection bracket.
double bisect_zero_crossing(const std::function<double(double)>& g, double lo, double hi,
                            double tol);

std::vector<double> linspace(double lo, double hi, std::size_t n);
std::vector<double> logspace(double lo, double hi, std::size_t n);

} // namespace spdcopt
