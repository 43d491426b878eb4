#ifndef CFGQM_GRID_HPP
#define CFGQM_GRID_HPP

#include <cmath>
#include <cstddef>
#include <string>

#include "cfgqm/errors.hpp"

namespace cfgqm {

struct PhysicalConstants {
  double hbar = 1.0;

  void validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar))
      throw ConfigError("hbar must be positive and finite");
  }
  bool operator==(const PhysicalConstants&) const = default;
};

/// One periodic axis sampled at lo + i*(hi-lo)/n, i = 0..n-1.
struct Axis1D {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 8;

  double spacing() const { return (hi - lo) / static_cast<double>(n); }
  double length() const { return hi - lo; }
  double node(std::size_t i) const { return lo + static_cast<double>(i) * spacing(); }
  bool operator==(const Axis1D&) const = default;
};

namespace detail {

inline void validate_axis(const Axis1D& a, const std::string& name_lo, const std::string& name_hi,
                          const std::string& name_n) {
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi))
    throw ConfigError(name_lo + "/" + name_hi + " must be finite");
  if (!(a.hi > a.lo))
    throw ConfigError(name_hi + " must be greater than " + name_lo);
  if (a.n < 8)
    throw ConfigError(name_n + " must be at least 8");
  if (a.n % 2 != 0)
    throw ConfigError(name_n + " must be even");
}

}  // namespace detail

/// Uniform periodic grid over (x, v). Node (i, j) sits at (x_i, v_j) and is
/// stored at flat index i*n_v + j.
struct Grid2D {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n_x = 8;
  double v_min = -1.0;
  double v_max = 1.0;
  std::size_t n_v = 8;

  double dx() const { return (x_max - x_min) / static_cast<double>(n_x); }
  double dv() const { return (v_max - v_min) / static_cast<double>(n_v); }
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
  double v(std::size_t j) const { return v_min + static_cast<double>(j) * dv(); }
  std::size_t size() const { return n_x * n_v; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * n_v + j; }
  Axis1D x_axis() const { return {x_min, x_max, n_x}; }
  Axis1D v_axis() const { return {v_min, v_max, n_v}; }

  void validate() const {
    detail::validate_axis(x_axis(), "x_min", "x_max", "n_x");
    detail::validate_axis(v_axis(), "v_min", "v_max", "n_v");
  }
  bool operator==(const Grid2D&) const = default;
};

struct Grid1D {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n_x = 8;

  double dx() const { return (x_max - x_min) / static_cast<double>(n_x); }
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
  std::size_t size() const { return n_x; }
  Axis1D x_axis() const { return {x_min, x_max, n_x}; }

  void validate() const { detail::validate_axis(x_axis(), "x_min", "x_max", "n_x"); }
  bool operator==(const Grid1D&) const = default;
};

inline Grid2D make_grid(double x_min, double x_max, std::size_t n_x, double v_min, double v_max,
                        std::size_t n_v) {
  Grid2D g{x_min, x_max, n_x, v_min, v_max, n_v};
  g.validate();
  return g;
}

inline Grid1D make_grid_1d(double x_min, double x_max, std::size_t n_x) {
  Grid1D g{x_min, x_max, n_x};
  g.validate();
  return g;
}

}  // namespace cfgqm

#endif  // CFGQM_GRID_HPP
