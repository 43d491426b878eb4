#ifndef CFGQM_TESTS_SUPPORT_HPP
#define CFGQM_TESTS_SUPPORT_HPP

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "cfgqm/cfgqm.hpp"

namespace cfgqm::test {

inline Grid2D square_grid(double half = 8.0, std::size_t n = 128) { return make_grid(-half, half, n, -half, half, n); }

inline double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

/// Gaussian evaluated directly from the closed form at arbitrary (x, v),
/// normalized analytically. Used as an oracle independent of the grid code.
inline Complex analytic_gaussian(double x, double v, const PacketParams& p, double hbar = 1.0) {
  const double dx = x - p.x0, dv = v - p.v0;
  const double nrm = 1.0 / std::sqrt(2.0 * std::numbers::pi * p.sigma_x * p.sigma_v);
  return nrm * std::exp(-dx * dx / (4.0 * p.sigma_x * p.sigma_x) - dv * dv / (4.0 * p.sigma_v * p.sigma_v)) *
         std::polar(1.0, (p.p0 * x + p.a0 * v) / hbar);
}

/// Random Gaussian whose centre keeps `clear` widths from every edge.
inline PacketParams random_interior_packet(std::mt19937_64& rng, const Grid2D& g, double sig_lo, double sig_hi,
                                           double clear, bool phases = true) {
  std::uniform_real_distribution<double> us(sig_lo, sig_hi);
  PacketParams p;
  p.sigma_x = us(rng);
  p.sigma_v = us(rng);
  std::uniform_real_distribution<double> ux(g.x_min + clear * p.sigma_x, g.x_max - clear * p.sigma_x);
  std::uniform_real_distribution<double> uv(g.v_min + clear * p.sigma_v, g.v_max - clear * p.sigma_v);
  p.x0 = ux(rng);
  p.v0 = uv(rng);
  if (phases) {
    std::uniform_real_distribution<double> uk(-2.0, 2.0);
    p.p0 = uk(rng);
    p.a0 = uk(rng);
  }
  return p;
}

}  // namespace cfgqm::test

#endif  // CFGQM_TESTS_SUPPORT_HPP
