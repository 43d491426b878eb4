#ifndef CFGQM_WAVEFUNCTION_HPP
#define CFGQM_WAVEFUNCTION_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "cfgqm/errors.hpp"
#include "cfgqm/grid.hpp"

namespace cfgqm {

using Complex = std::complex<double>;

/// Amplitudes psi(x_i, v_j) on a periodic (x, v) grid, row-major over x then v.
struct WaveFunction2D {
  Grid2D grid;
  std::vector<Complex> amps;

  WaveFunction2D() = default;
  explicit WaveFunction2D(const Grid2D& g) : grid(g), amps(g.size()) {}
  WaveFunction2D(const Grid2D& g, std::vector<Complex> a) : grid(g), amps(std::move(a)) {
    if (amps.size() != grid.size()) throw ShapeError("amplitude count does not match grid");
  }

  Complex& at(std::size_t i, std::size_t j) { return amps[grid.index(i, j)]; }
  const Complex& at(std::size_t i, std::size_t j) const { return amps[grid.index(i, j)]; }
  double cell() const { return grid.dx() * grid.dv(); }
};

struct WaveFunction1D {
  Grid1D grid;
  std::vector<Complex> amps;

  WaveFunction1D() = default;
  explicit WaveFunction1D(const Grid1D& g) : grid(g), amps(g.size()) {}
  WaveFunction1D(const Grid1D& g, std::vector<Complex> a) : grid(g), amps(std::move(a)) {
    if (amps.size() != grid.size()) throw ShapeError("amplitude count does not match grid");
  }
  double cell() const { return grid.dx(); }
};

namespace detail {

inline void require_finite(std::span<const Complex> a) {
  for (const auto& z : a)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw DataError("non-finite amplitude");
}

inline double sum_abs2(std::span<const Complex> a) {
  double s = 0.0;
  for (const auto& z : a) s += z.real() * z.real() + z.imag() * z.imag();
  return s;
}

// sum conj(a) b, written out so that swapping a and b conjugates the result bit for bit.
inline Complex sum_conj_product(std::span<const Complex> a, std::span<const Complex> b) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double ar = a[k].real(), ai = a[k].imag(), br = b[k].real(), bi = b[k].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

}  // namespace detail

inline double norm(const WaveFunction2D& wf) {
  detail::require_finite(wf.amps);
  return std::sqrt(detail::sum_abs2(wf.amps) * wf.cell());
}

inline double norm(const WaveFunction1D& wf) {
  detail::require_finite(wf.amps);
  return std::sqrt(detail::sum_abs2(wf.amps) * wf.cell());
}

inline Complex inner_product(const WaveFunction2D& a, const WaveFunction2D& b) {
  if (!(a.grid == b.grid)) throw ShapeError("inner_product: grid mismatch");
  return detail::sum_conj_product(a.amps, b.amps) * a.cell();
}

inline Complex inner_product(const WaveFunction1D& a, const WaveFunction1D& b) {
  if (!(a.grid == b.grid)) throw ShapeError("inner_product: grid mismatch");
  return detail::sum_conj_product(a.amps, b.amps) * a.cell();
}

template <class WF>
WF normalized(WF wf) {
  const double n = norm(wf);
  if (!(n > 0.0)) throw DataError("cannot normalize a zero field");
  for (auto& z : wf.amps) z /= n;
  return wf;
}

template <class WF>
WF scaled(WF wf, Complex s) {
  for (auto& z : wf.amps) z *= s;
  return wf;
}

/// |psi| of our Gaussians at five widths from the centre, relative to the peak.
inline const double kSupportAmplitudeRatio = std::exp(-25.0 / 4.0);

/// Parameters of a Gaussian stand-in for a "most classical" |x, v> state.
/// The amplitude envelope is exp(-(x-x0)^2 / (4 sigma_x^2)), so sigma_x is the
/// position uncertainty itself. p0 and a0 add momentum and acceleratum phases.
struct PacketParams {
  double x0 = 0.0;
  double v0 = 0.0;
  double sigma_x = 1.0;
  double sigma_v = 1.0;
  double p0 = 0.0;
  double a0 = 0.0;
  bool operator==(const PacketParams&) const = default;
};

inline constexpr double kDefaultMinWidthCells = 3.0;

namespace detail {

inline void check_packet_axis(double center, double sigma, double lo, double hi, double spacing,
                              double min_cells, const char* name) {
  if (!std::isfinite(center) || !std::isfinite(sigma) || !(sigma > 0.0))
    throw ArgumentError(std::string("gaussian_packet: invalid ") + name + " parameters");
  if (sigma < min_cells * spacing * (1.0 - 1e-12))
    throw ResolutionError(std::string("gaussian_packet: sigma_") + name + " is below the resolution floor");
  if (center - 5.0 * sigma < lo || center + 5.0 * sigma > hi)
    throw DomainError(std::string("gaussian_packet: ") + name + "0 is within 5 sigma of the boundary");
}

}  // namespace detail

inline WaveFunction2D gaussian_packet(const Grid2D& grid, const PacketParams& p,
                                      const PhysicalConstants& pc = {},
                                      double min_width_cells = kDefaultMinWidthCells) {
  grid.validate();
  detail::check_packet_axis(p.x0, p.sigma_x, grid.x_min, grid.x_max, grid.dx(), min_width_cells, "x");
  detail::check_packet_axis(p.v0, p.sigma_v, grid.v_min, grid.v_max, grid.dv(), min_width_cells, "v");

  std::vector<Complex> row_x(grid.n_x), row_v(grid.n_v);
  for (std::size_t i = 0; i < grid.n_x; ++i) {
    const double x = grid.x(i), d = x - p.x0;
    row_x[i] = std::exp(-d * d / (4.0 * p.sigma_x * p.sigma_x)) * std::polar(1.0, p.p0 * x / pc.hbar);
  }
  for (std::size_t j = 0; j < grid.n_v; ++j) {
    const double v = grid.v(j), d = v - p.v0;
    row_v[j] = std::exp(-d * d / (4.0 * p.sigma_v * p.sigma_v)) * std::polar(1.0, p.a0 * v / pc.hbar);
  }
  WaveFunction2D wf(grid);
  for (std::size_t i = 0; i < grid.n_x; ++i)
    for (std::size_t j = 0; j < grid.n_v; ++j) wf.at(i, j) = row_x[i] * row_v[j];
  return normalized(std::move(wf));
}

inline WaveFunction1D gaussian_packet_1d(const Grid1D& grid, double x0, double sigma_x, double p0 = 0.0,
                                         const PhysicalConstants& pc = {},
                                         double min_width_cells = kDefaultMinWidthCells) {
  grid.validate();
  detail::check_packet_axis(x0, sigma_x, grid.x_min, grid.x_max, grid.dx(), min_width_cells, "x");
  WaveFunction1D wf(grid);
  for (std::size_t i = 0; i < grid.n_x; ++i) {
    const double x = grid.x(i), d = x - x0;
    wf.amps[i] = std::exp(-d * d / (4.0 * sigma_x * sigma_x)) * std::polar(1.0, p0 * x / pc.hbar);
  }
  return normalized(std::move(wf));
}

template <class WF>
double l2_distance(const WF& a, const WF& b) {
  if (a.grid != b.grid) throw ShapeError("l2_distance: grids differ");
  double s = 0.0;
  for (std::size_t k = 0; k < a.amps.size(); ++k) s += std::norm(a.amps[k] - b.amps[k]);
  return std::sqrt(s * a.cell());
}

/// Normalized sum_n sqrt(P_n) |packet_n>.
inline WaveFunction2D superpose(const Grid2D& grid, std::span<const PacketParams> packets,
                                std::span<const double> weights, const PhysicalConstants& pc = {},
                                double min_width_cells = kDefaultMinWidthCells) {
  if (packets.size() != weights.size() || packets.empty())
    throw ArgumentError("superpose: need one weight per packet");
  WaveFunction2D out(grid);
  for (std::size_t n = 0; n < packets.size(); ++n) {
    if (!(weights[n] >= 0.0)) throw ArgumentError("superpose: weights must be non-negative");
    const auto g = gaussian_packet(grid, packets[n], pc, min_width_cells);
    const double w = std::sqrt(weights[n]);
    for (std::size_t k = 0; k < out.amps.size(); ++k) out.amps[k] += w * g.amps[k];
  }
  return normalized(std::move(out));
}

/// Index box of all nodes whose amplitude is at least kSupportAmplitudeRatio
/// of the peak, i.e. the five-sigma support of a Gaussian.
struct SupportBox {
  std::size_t i_lo, i_hi, j_lo, j_hi;
};

inline double max_abs(std::span<const Complex> a) {
  double m = 0.0;
  for (const auto& z : a) m = std::max(m, std::abs(z));
  return m;
}

inline SupportBox support_box(const WaveFunction2D& wf) {
  const double cut = kSupportAmplitudeRatio * max_abs(wf.amps);
  SupportBox b{wf.grid.n_x, 0, wf.grid.n_v, 0};
  for (std::size_t i = 0; i < wf.grid.n_x; ++i)
    for (std::size_t j = 0; j < wf.grid.n_v; ++j)
      if (std::abs(wf.at(i, j)) >= cut) {
        b.i_lo = std::min(b.i_lo, i);
        b.i_hi = std::max(b.i_hi, i);
        b.j_lo = std::min(b.j_lo, j);
        b.j_hi = std::max(b.j_hi, j);
      }
  return b;
}

/// True when the five-sigma support stays off the outermost row and column of
/// every edge, so nothing significant straddles a periodic seam.
inline bool is_interior(const WaveFunction2D& wf) {
  const auto b = support_box(wf);
  if (b.i_lo > b.i_hi) return false;
  return b.i_lo > 0 && b.i_hi + 1 < wf.grid.n_x && b.j_lo > 0 && b.j_hi + 1 < wf.grid.n_v;
}

inline bool is_interior(const WaveFunction1D& wf) {
  const double cut = kSupportAmplitudeRatio * max_abs(wf.amps);
  const std::size_t n = wf.grid.n_x;
  return std::abs(wf.amps[0]) < cut && std::abs(wf.amps[n - 1]) < cut;
}

}  // namespace cfgqm

#endif  // CFGQM_WAVEFUNCTION_HPP
