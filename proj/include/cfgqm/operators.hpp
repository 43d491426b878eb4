#ifndef CFGQM_OPERATORS_HPP
#define CFGQM_OPERATORS_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>

#include "cfgqm/errors.hpp"
#include "cfgqm/force.hpp"
#include "cfgqm/grid.hpp"
#include "cfgqm/spectral.hpp"
#include "cfgqm/wavefunction.hpp"

namespace cfgqm {

enum class ObservableTag { Position, Velocity, Momentum, Acceleratum, ClassicalEnergy };

inline const char* to_string(ObservableTag t) {
  switch (t) {
    case ObservableTag::Position: return "position";
    case ObservableTag::Velocity: return "velocity";
    case ObservableTag::Momentum: return "momentum";
    case ObservableTag::Acceleratum: return "acceleratum";
    case ObservableTag::ClassicalEnergy: return "classical_energy";
  }
  return "?";
}

inline bool is_diagonal(ObservableTag t) {
  return t == ObservableTag::Position || t == ObservableTag::Velocity || t == ObservableTag::ClassicalEnergy;
}

namespace detail {

inline void require_workspace(const SpectralWorkspace& ws, const Grid2D& g) {
  if (!(ws.grid() == g)) throw ShapeError("spectral workspace was built for a different grid");
}

// Value of a diagonal operator at node (i, j).
inline double diagonal_value(ObservableTag t, const Grid2D& g, std::size_t i, std::size_t j,
                             const ForceField* force) {
  switch (t) {
    case ObservableTag::Position: return g.x(i);
    case ObservableTag::Velocity: return g.v(j);
    case ObservableTag::ClassicalEnergy: {
      const double v = g.v(j);
      return 0.5 * force->mass() * v * v + force->potential(g.x(i));
    }
    default: break;
  }
  throw ArgumentError("not a diagonal observable");
}

}  // namespace detail

/// -i hbar d/dx along every v-row, in place.
inline void apply_momentum_inplace(std::span<Complex> data, const SpectralWorkspace& ws, double hbar) {
  const auto k = ws.kx();
  ws.apply_multiplier(data, Axis::X, [&](std::size_t, std::size_t m) { return Complex(hbar * odd_derivative_k(k, m)); });
}

/// -i hbar d/dv along every x-column, in place.
inline void apply_acceleratum_inplace(std::span<Complex> data, const SpectralWorkspace& ws, double hbar) {
  const auto k = ws.kv();
  ws.apply_multiplier(data, Axis::V, [&](std::size_t, std::size_t m) { return Complex(hbar * odd_derivative_k(k, m)); });
}

/// Action of one observable on a state. The input is left untouched.
inline WaveFunction2D apply_operator(ObservableTag tag, const WaveFunction2D& wf, const SpectralWorkspace& ws,
                                     const PhysicalConstants& pc = {}, const ForceField* force = nullptr) {
  detail::require_finite(wf.amps);
  if (tag == ObservableTag::ClassicalEnergy && force == nullptr)
    throw ArgumentError("apply_operator: classical energy needs a force field");
  WaveFunction2D out = wf;
  const Grid2D& g = wf.grid;
  switch (tag) {
    case ObservableTag::Position:
    case ObservableTag::Velocity:
    case ObservableTag::ClassicalEnergy:
      for (std::size_t i = 0; i < g.n_x; ++i)
        for (std::size_t j = 0; j < g.n_v; ++j) out.at(i, j) *= detail::diagonal_value(tag, g, i, j, force);
      break;
    case ObservableTag::Momentum:
      detail::require_workspace(ws, g);
      apply_momentum_inplace(out.amps, ws, pc.hbar);
      break;
    case ObservableTag::Acceleratum:
      detail::require_workspace(ws, g);
      apply_acceleratum_inplace(out.amps, ws, pc.hbar);
      break;
  }
  return out;
}

inline WaveFunction2D apply_operator(ObservableTag tag, const WaveFunction2D& wf, const PhysicalConstants& pc = {},
                                     const ForceField* force = nullptr) {
  SpectralWorkspace ws(wf.grid);
  return apply_operator(tag, wf, ws, pc, force);
}

/// H_dyn psi = v (p psi) + f(x) (a psi), matrix free.
inline WaveFunction2D apply_hdyn(const WaveFunction2D& wf, const ForceField& force, const SpectralWorkspace& ws,
                                 const PhysicalConstants& pc = {}) {
  detail::require_workspace(ws, wf.grid);
  const Grid2D& g = wf.grid;
  WaveFunction2D p = wf;
  apply_momentum_inplace(p.amps, ws, pc.hbar);
  WaveFunction2D out(g);
  for (std::size_t i = 0; i < g.n_x; ++i)
    for (std::size_t j = 0; j < g.n_v; ++j) out.at(i, j) = g.v(j) * p.at(i, j);
  if (!force.is_free()) {
    WaveFunction2D a = wf;
    apply_acceleratum_inplace(a.amps, ws, pc.hbar);
    for (std::size_t i = 0; i < g.n_x; ++i) {
      const double fx = force.f(g.x(i));
      for (std::size_t j = 0; j < g.n_v; ++j) out.at(i, j) += fx * a.at(i, j);
    }
  }
  return out;
}

/// Momentum-velocity amplitudes psi~(p, v). The returned field lives on a
/// Grid2D whose first axis is momentum, p_q = p_min + q dp with
/// p_min = -hbar pi / dx and dp = 2 pi hbar / L, so norm() works unchanged.
inline Grid2D momentum_grid(const Grid2D& g, const PhysicalConstants& pc = {}) {
  const double half = pc.hbar * std::numbers::pi / g.dx();
  return {-half, half, g.n_x, g.v_min, g.v_max, g.n_v};
}

inline WaveFunction2D to_momentum_rep(const WaveFunction2D& wf, const SpectralWorkspace& ws,
                                      const PhysicalConstants& pc = {}) {
  detail::require_workspace(ws, wf.grid);
  detail::require_finite(wf.amps);
  const Grid2D& g = wf.grid;
  const std::size_t n = g.n_x;
  const auto k = ws.kx();
  const double scale = g.dx() / std::sqrt(2.0 * std::numbers::pi * pc.hbar);
  WaveFunction2D work = wf;
  WaveFunction2D out(momentum_grid(g, pc));
  const FftPlan& plan = ws.plan(Axis::X);
  ws.for_each_line(work.amps, Axis::X, [&](std::size_t, std::span<Complex> buf) {
    plan.forward(buf.data());
    for (std::size_t m = 0; m < n; ++m) buf[m] *= scale * std::polar(1.0, -k[m] * g.x_min);
  });
  // transform order -> ascending p
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t m = (q + n / 2) % n;
    for (std::size_t j = 0; j < g.n_v; ++j) out.at(q, j) = work.at(m, j);
  }
  return out;
}

inline WaveFunction2D from_momentum_rep(const WaveFunction2D& pv, const Grid2D& position_grid,
                                        const SpectralWorkspace& ws, const PhysicalConstants& pc = {}) {
  detail::require_workspace(ws, position_grid);
  if (pv.grid.n_x != position_grid.n_x || pv.grid.n_v != position_grid.n_v)
    throw ShapeError("from_momentum_rep: grid mismatch");
  const Grid2D& g = position_grid;
  const std::size_t n = g.n_x;
  const auto k = ws.kx();
  const double scale = std::sqrt(2.0 * std::numbers::pi * pc.hbar) / (g.dx() * static_cast<double>(n));
  WaveFunction2D out(g);
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t m = (q + n / 2) % n;
    for (std::size_t j = 0; j < g.n_v; ++j) out.at(m, j) = pv.at(q, j);
  }
  const FftPlan& plan = ws.plan(Axis::X);
  ws.for_each_line(out.amps, Axis::X, [&](std::size_t, std::span<Complex> buf) {
    for (std::size_t m = 0; m < n; ++m) buf[m] *= scale * std::polar(1.0, k[m] * g.x_min);
    plan.backward(buf.data());
  });
  return out;
}

namespace detail {

// Rejects a shift along `axis` that would push the five-sigma support onto
// or across the periodic seam.
inline void check_shift_budget(const WaveFunction2D& wf, Axis axis, double shift) {
  const auto b = support_box(wf);
  const Grid2D& g = wf.grid;
  const bool along_x = axis == Axis::X;
  const std::size_t n = along_x ? g.n_x : g.n_v;
  const std::size_t lo = along_x ? b.i_lo : b.j_lo, hi = along_x ? b.i_hi : b.j_hi;
  const double h = along_x ? g.dx() : g.dv();
  const double first = along_x ? g.x_min : g.v_min;
  if (lo > hi || lo == 0 || hi + 1 >= n)
    throw DomainError("shift: state support touches the periodic boundary");
  const double new_lo = first + static_cast<double>(lo) * h + shift;
  const double new_hi = first + static_cast<double>(hi) * h + shift;
  if (new_lo <= first || new_hi >= first + static_cast<double>(n - 1) * h)
    throw DomainError(std::string("shift of ") + std::to_string(shift) + " violates the wrap budget");
}

inline void shift_along(std::span<Complex> data, const SpectralWorkspace& ws, Axis axis, double shift) {
  if (shift == 0.0) return;
  const auto k = ws.k(axis);
  ws.apply_multiplier(data, axis, [&](std::size_t, std::size_t m) { return std::polar(1.0, -k[m] * shift); });
}

}  // namespace detail

/// exp(-i xi p / hbar): moves the state by xi along x.
inline WaveFunction2D translate_x(const WaveFunction2D& wf, double xi, const SpectralWorkspace& ws) {
  detail::require_workspace(ws, wf.grid);
  detail::require_finite(wf.amps);
  if (xi == 0.0) return wf;
  detail::check_shift_budget(wf, Axis::X, xi);
  WaveFunction2D out = wf;
  detail::shift_along(out.amps, ws, Axis::X, xi);
  return out;
}

/// exp(-i alpha a / hbar): moves the state by alpha along v.
inline WaveFunction2D boost_v(const WaveFunction2D& wf, double alpha, const SpectralWorkspace& ws) {
  detail::require_workspace(ws, wf.grid);
  detail::require_finite(wf.amps);
  if (alpha == 0.0) return wf;
  detail::check_shift_budget(wf, Axis::V, alpha);
  WaveFunction2D out = wf;
  detail::shift_along(out.amps, ws, Axis::V, alpha);
  return out;
}

struct CommutatorResult {
  WaveFunction2D field;  // [A, B] psi
  Complex expected;      // c such that [A, B] = c on admissible states
};

inline Complex expected_commutator(ObservableTag a, ObservableTag b, const PhysicalConstants& pc) {
  using T = ObservableTag;
  const Complex ih(0.0, pc.hbar);
  if (a == T::Position && b == T::Momentum) return ih;
  if (a == T::Momentum && b == T::Position) return -ih;
  if (a == T::Velocity && b == T::Acceleratum) return ih;
  if (a == T::Acceleratum && b == T::Velocity) return -ih;
  return 0.0;
}

/// [A, B] psi for two of x, v, p, a, on a state whose support keeps clear of
/// the periodic seam. Pairs of diagonal operators are composed as a single
/// multiplier, so their commutator field is exactly zero.
inline CommutatorResult commutator_residual(ObservableTag a, ObservableTag b, const WaveFunction2D& wf,
                                            const SpectralWorkspace& ws, const PhysicalConstants& pc = {}) {
  if (a == ObservableTag::ClassicalEnergy || b == ObservableTag::ClassicalEnergy)
    throw ArgumentError("commutator_residual: classical energy has no constant commutator");
  detail::require_finite(wf.amps);
  if (!is_interior(wf)) throw PreconditionError("commutator_residual: state is supported on the boundary");
  const Grid2D& g = wf.grid;
  WaveFunction2D field(g);
  if (is_diagonal(a) && is_diagonal(b)) {
    for (std::size_t i = 0; i < g.n_x; ++i)
      for (std::size_t j = 0; j < g.n_v; ++j) {
        const double va = detail::diagonal_value(a, g, i, j, nullptr);
        const double vb = detail::diagonal_value(b, g, i, j, nullptr);
        field.at(i, j) = (va * vb) * wf.at(i, j) - (vb * va) * wf.at(i, j);
      }
  } else {
    const auto ab = apply_operator(a, apply_operator(b, wf, ws, pc), ws, pc);
    const auto ba = apply_operator(b, apply_operator(a, wf, ws, pc), ws, pc);
    for (std::size_t k = 0; k < field.amps.size(); ++k) field.amps[k] = ab.amps[k] - ba.amps[k];
  }
  return {std::move(field), expected_commutator(a, b, pc)};
}

/// max |[A, B] psi - c psi|.
inline double commutator_defect(const CommutatorResult& r, const WaveFunction2D& wf) {
  double m = 0.0;
  for (std::size_t k = 0; k < wf.amps.size(); ++k) m = std::max(m, std::abs(r.field.amps[k] - r.expected * wf.amps[k]));
  return m;
}

enum class WeylKind { PositionMomentum, VelocityAcceleratum };

/// Applies both sides of a Weyl relation to psi and returns the largest
/// pointwise difference:
///   exp(-i s G/hbar) exp(-i c Q/hbar) = exp(i s c/hbar) exp(-i c Q/hbar) exp(-i s G/hbar)
/// with (Q, G) = (x, p) or (v, a); s is the shift (xi or alpha) and c is mu or beta.
inline double weyl_residual(WeylKind kind, const WaveFunction2D& wf, double shift, double coupling,
                            const SpectralWorkspace& ws, const PhysicalConstants& pc = {}) {
  detail::require_workspace(ws, wf.grid);
  const Grid2D& g = wf.grid;
  const bool xp = kind == WeylKind::PositionMomentum;
  auto phase_q = [&](WaveFunction2D s) {
    if (coupling == 0.0) return s;
    for (std::size_t i = 0; i < g.n_x; ++i)
      for (std::size_t j = 0; j < g.n_v; ++j)
        s.at(i, j) *= std::polar(1.0, -coupling * (xp ? g.x(i) : g.v(j)) / pc.hbar);
    return s;
  };
  auto generator = [&](const WaveFunction2D& s) { return xp ? translate_x(s, shift, ws) : boost_v(s, shift, ws); };

  const WaveFunction2D lhs = generator(phase_q(wf));
  WaveFunction2D rhs = phase_q(generator(wf));
  const double theta = shift * coupling / pc.hbar;
  if (theta != 0.0) {
    const Complex c = std::polar(1.0, theta);
    for (auto& z : rhs.amps) z *= c;
  }
  double m = 0.0;
  for (std::size_t k = 0; k < lhs.amps.size(); ++k) m = std::max(m, std::abs(lhs.amps[k] - rhs.amps[k]));
  return m;
}

}  // namespace cfgqm

#endif  // CFGQM_OPERATORS_HPP
