#pragma once

#include <complex>

// Arrival-time covariance of the pair, computed directly from the Gaussian
// spectral amplitude exp(-nu^T M nu) with complex symmetric M. The time
// amplitude is exp(-t^T M^-1 t / 4), so the intensity covariance is
// (Re M^-1)^-1. Independent of the closed forms under test.

namespace spdcopt::test {

struct Cov2 {
  double aa, ab, bb;
  double inv_cond = 0.0; // (Sigma^-1)_aa when known; avoids cancellation

  double var_a() const { return aa; }
  double cond_var_a() const { return inv_cond > 0.0 ? 1.0 / inv_cond : aa - ab * ab / bb; }
  Cov2 with_jitter(double ja, double jb) const { return {aa + ja * ja, ab, bb + jb * jb}; }
};

inline Cov2 arrival_covariance(double tau_p, double sigma, double d_a, double d_b) {
  using C = std::complex<double>;
  const double s2 = 1.0 / (sigma * sigma);
  const double p2 = tau_p * tau_p / 4.0;
  const C m11(s2 + p2, -d_a);
  const C m22(s2 + p2, -d_b);
  const C m12(p2 - s2, 0.0);
  // (s2 + p2)^2 - (p2 - s2)^2 expanded, so widely different s2 and p2 do not cancel.
  const C det(4.0 * s2 * p2 - d_a * d_b, -(s2 + p2) * (d_a + d_b));
  const double r11 = (m22 / det).real();
  const double r22 = (m11 / det).real();
  const double r12 = (-m12 / det).real();
  const double rdet = r11 * r22 - r12 * r12;
  return {r22 / rdet, -r12 / rdet, r11 / rdet, r11};
}

} // namespace spdcopt::test
