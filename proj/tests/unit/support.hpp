#pragma once

#include <cmath>
#include <random>

namespace spdcopt::test {

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace spdcopt::test
