#ifndef CFGQM_PROPAGATORS_HPP
#define CFGQM_PROPAGATORS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "cfgqm/classical.hpp"
#include "cfgqm/errors.hpp"
#include "cfgqm/force.hpp"
#include "cfgqm/observables.hpp"
#include "cfgqm/operators.hpp"
#include "cfgqm/spectral.hpp"
#include "cfgqm/wavefunction.hpp"

namespace cfgqm {

enum class Method { StrangSplit, Characteristics };

/// Which advection wraps the other in a Strang step. Both are second order;
/// XVX (half x, full v, half x) is the default.
enum class SplitOrder { XVX, VXV };

struct EvolveSpec {
  double dt = 1e-3;
  std::size_t n_steps = 1;
  Method method = Method::StrangSplit;
  std::size_t record_every = 1;
  SplitOrder order = SplitOrder::XVX;
  unsigned workers = 1;
  std::size_t snapshot_every = 0;  // 0: no snapshots

  double duration() const { return dt * static_cast<double>(n_steps); }

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("evolve.dt must be positive");
    if (n_steps < 1) throw ConfigError("evolve.n_steps must be at least 1");
    if (record_every < 1 || n_steps % record_every != 0)
      throw ConfigError("evolve.record_every must divide evolve.n_steps");
    if (workers < 1) throw ConfigError("evolve.workers must be at least 1");
  }
};

// ---------------------------------------------------------------------------
// Wrap budget

/// Flows the five-sigma support of `wf` along the classical flow for
/// `duration` and throws DomainError if any of it would reach the periodic
/// seam. Runs before any spectral work.
inline void check_wrap_budget(const WaveFunction2D& wf, const ForceField& force, double duration) {
  const Grid2D& g = wf.grid;
  if (!is_interior(wf)) throw DomainError("wrap budget: initial support touches the periodic boundary");
  const double cut = kSupportAmplitudeRatio * max_abs(wf.amps);
  std::vector<ClassicalState> pts;
  for (std::size_t i = 0; i < g.n_x; ++i)
    for (std::size_t j = 0; j < g.n_v; ++j)
      if (std::abs(wf.at(i, j)) >= cut) pts.push_back({g.x(i), g.v(j)});
  const std::size_t stride = std::max<std::size_t>(1, pts.size() / 4096);

  const double x_hi = g.x(g.n_x - 1), v_hi = g.v(g.n_v - 1);
  const auto steps = static_cast<std::size_t>(std::ceil(std::abs(duration) / 1e-2));
  const double h = steps ? duration / static_cast<double>(steps) : 0.0;
  for (std::size_t n = 0; n < pts.size(); n += stride) {
    ClassicalState s = pts[n];
    for (std::size_t k = 1; k <= steps; ++k) {
      s = rk4_step(s, force, h);
      if (!(s.x >= g.x_min && s.x <= x_hi && s.v >= g.v_min && s.v <= v_hi))
        throw DomainError("wrap budget: support reaches (x, v) = (" + std::to_string(s.x) + ", " +
                          std::to_string(s.v) + ") at t = " + std::to_string(static_cast<double>(k) * h));
    }
  }
}

/// One-dimensional version for basic QM: the support edges and centre are
/// moved classically with velocities <p>/m and <p>/m +- 5 Delta p / m.
inline void check_wrap_budget_1d(const WaveFunction1D& wf, const ForceField& force, double duration,
                                 const PhysicalConstants& pc = {}) {
  const Grid1D& g = wf.grid;
  if (!is_interior(wf)) throw DomainError("wrap budget: initial support touches the periodic boundary");
  const double cut = kSupportAmplitudeRatio * max_abs(wf.amps);
  std::size_t lo = g.n_x, hi = 0;
  for (std::size_t i = 0; i < g.n_x; ++i)
    if (std::abs(wf.amps[i]) >= cut) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  SpectralWorkspace1D ws(g);
  const auto r = measure_1d(wf, ws, pc, &force, 0.0);
  const double vbar = r.mean_p / force.mass(), dv = 5.0 * r.std_p / force.mass();
  const auto steps = static_cast<std::size_t>(std::ceil(std::abs(duration) / 1e-2));
  const double h = steps ? duration / static_cast<double>(steps) : 0.0;
  for (double x : {g.x(lo), r.mean_x, g.x(hi)})
    for (double v : {vbar - dv, vbar, vbar + dv}) {
      ClassicalState s{x, v};
      for (std::size_t k = 1; k <= steps; ++k) {
        s = rk4_step(s, force, h);
        if (!(s.x >= g.x_min && s.x <= g.x(g.n_x - 1)))
          throw DomainError("wrap budget: support reaches x = " + std::to_string(s.x) +
                            " at t = " + std::to_string(static_cast<double>(k) * h));
      }
    }
}

// ---------------------------------------------------------------------------
// Characteristics oracle

/// Reference solver: psi(x, v, t) = psi0(Phi_{-t}(x, v)). Each node is carried
/// back along the classical flow with RK4 (steps of at most 1e-3) and psi0 is
/// evaluated there by its trigonometric interpolant, or taken as zero when the
/// preimage leaves the grid box.
inline WaveFunction2D evolve_characteristics(const WaveFunction2D& wf0, const ForceField& force, double t,
                                             unsigned workers = 1) {
  detail::require_finite(wf0.amps);
  if (t == 0.0) return wf0;
  check_wrap_budget(wf0, force, t);
  const Grid2D& g = wf0.grid;
  const std::size_t nx = g.n_x, nv = g.n_v;

  // Interpolation coefficients c[m][n] = DFT2(psi0) / (nx nv).
  SpectralWorkspace ws(g, workers);
  WaveFunction2D coeff = wf0;
  ws.for_each_line(coeff.amps, Axis::X, [&](std::size_t, std::span<Complex> b) { ws.plan(Axis::X).forward(b.data()); });
  ws.for_each_line(coeff.amps, Axis::V, [&](std::size_t, std::span<Complex> b) { ws.plan(Axis::V).forward(b.data()); });
  const double inv = 1.0 / static_cast<double>(nx * nv);
  for (auto& z : coeff.amps) z *= inv;

  // Modes below 1e-16 of the peak coefficient contribute nothing measurable;
  // keep the symmetric box of signed modes that holds everything above it.
  const double peak = max_abs(coeff.amps);
  auto signed_mode = [](std::size_t m, std::size_t n) { return m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n); };
  long mx = 0, mv = 0;
  for (std::size_t m = 0; m < nx; ++m)
    for (std::size_t n = 0; n < nv; ++n)
      if (std::abs(coeff.at(m, n)) > 1e-16 * peak) {
        mx = std::max(mx, std::abs(signed_mode(m, nx)));
        mv = std::max(mv, std::abs(signed_mode(n, nv)));
      }
  std::vector<std::size_t> act_x, act_v;
  for (std::size_t m = 0; m < nx; ++m)
    if (std::abs(signed_mode(m, nx)) <= mx) act_x.push_back(m);
  for (std::size_t n = 0; n < nv; ++n)
    if (std::abs(signed_mode(n, nv)) <= mv) act_v.push_back(n);
  const std::size_t ax = act_x.size(), av = act_v.size();
  std::vector<double> cre(ax * av), cim(ax * av);
  for (std::size_t a = 0; a < ax; ++a)
    for (std::size_t b = 0; b < av; ++b) {
      const Complex c = coeff.at(act_x[a], act_v[b]);
      cre[a * av + b] = c.real();
      cim[a * av + b] = c.imag();
    }

  // e^{i k s} for every active mode; the Nyquist mode of an even grid enters
  // as cos(k s), the symmetric choice that keeps real data real.
  const double kx0 = 2.0 * std::numbers::pi / g.x_axis().length();
  const double kv0 = 2.0 * std::numbers::pi / g.v_axis().length();
  auto basis = [](std::span<const std::size_t> act, std::size_t n, double k0, double s, std::vector<double>& re,
                  std::vector<double>& im) {
    for (std::size_t a = 0; a < act.size(); ++a) {
      const std::size_t m = act[a];
      const double k = k0 * static_cast<double>(m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n));
      if (m == n / 2) {
        re[a] = std::cos(k * s);
        im[a] = 0.0;
      } else {
        re[a] = std::cos(k * s);
        im[a] = std::sin(k * s);
      }
    }
  };

  WaveFunction2D out(g);
  detail::parallel_for(nx, workers, [&](std::size_t b, std::size_t e) {
    std::vector<double> exr(ax), exi(ax), evr(av), evi(av);
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = 0; j < nv; ++j) {
        const ClassicalState pre = classical_flow({g.x(i), g.v(j)}, force, -t, 1e-3);
        // psi0 lives on the plane with interior support; a preimage outside
        // the box is not a periodic image of it.
        if (pre.x < g.x_min || pre.x >= g.x_max || pre.v < g.v_min || pre.v >= g.v_max) continue;
        basis(act_x, nx, kx0, pre.x - g.x_min, exr, exi);
        basis(act_v, nv, kv0, pre.v - g.v_min, evr, evi);
        double sr = 0.0, si = 0.0;
        for (std::size_t a = 0; a < ax; ++a) {
          const double* cr = cre.data() + a * av;
          const double* ci = cim.data() + a * av;
          double ir = 0.0, ii = 0.0;
          for (std::size_t q = 0; q < av; ++q) {
            ir += cr[q] * evr[q] - ci[q] * evi[q];
            ii += cr[q] * evi[q] + ci[q] * evr[q];
          }
          sr += exr[a] * ir - exi[a] * ii;
          si += exr[a] * ii + exi[a] * ir;
        }
        out.at(i, j) = {sr, si};
      }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Configuration-space split-step propagator

struct ConfigEvolution {
  WaveFunction2D state;
  ObservableSeries series;
};

namespace detail {

// table[line][mode] = exp(-i k_mode * speed(line) * tau) / n
template <class Speed>
std::vector<Complex> advection_table(const SpectralWorkspace& ws, Axis axis, Speed&& speed, double tau) {
  const std::size_t len = ws.line_length(axis), lines = ws.line_count(axis);
  const auto k = ws.k(axis);
  const double inv = 1.0 / static_cast<double>(len);
  std::vector<Complex> t(len * lines);
  for (std::size_t l = 0; l < lines; ++l) {
    const double s = speed(l) * tau;
    for (std::size_t m = 0; m < len; ++m) t[l * len + m] = std::polar(inv, -k[m] * s);
  }
  return t;
}

inline void require_unit_norm(double n) {
  if (std::abs(n - 1.0) > kNormTolerance)
    throw PreconditionError("evolution needs a normalized state (norm = " + std::to_string(n) + ")");
}

}  // namespace detail

/// Integrates d psi/dt = -(v d/dx + f(x) d/dv) psi, i.e. i hbar d psi/dt =
/// H_dyn psi with H_dyn = v p + f(x) a. Each Strang substep is an exact
/// spectral shift, so every substep is unitary. Records are taken every
/// spec.record_every steps, starting with t = 0.
inline ConfigEvolution evolve_config_space(const WaveFunction2D& wf, const ForceField& force, const EvolveSpec& spec,
                                           const PhysicalConstants& pc = {}, const std::string& scenario = {}) {
  spec.validate();
  wf.grid.validate();
  detail::require_unit_norm(norm(wf));
  check_wrap_budget(wf, force, spec.duration());

  const Grid2D& g = wf.grid;
  SpectralWorkspace ws(g, spec.workers);
  ConfigEvolution run;
  run.series.meta = {scenario, summarize(g), spec.dt};
  auto record = [&](const WaveFunction2D& s, double t) { run.series.records.push_back(measure(s, ws, pc, &force, t)); };
  auto snapshot = [&](const WaveFunction2D& s, double t) { run.series.snapshots.push_back({t, s}); };

  record(wf, 0.0);
  if (spec.snapshot_every) snapshot(wf, 0.0);

  if (spec.method == Method::Characteristics) {
    WaveFunction2D s = wf;
    for (std::size_t step = spec.record_every; step <= spec.n_steps; step += spec.record_every) {
      const double t = static_cast<double>(step) * spec.dt;
      s = evolve_characteristics(wf, force, t, spec.workers);
      record(s, t);
      if (spec.snapshot_every && step % spec.snapshot_every == 0) snapshot(s, t);
    }
    run.state = std::move(s);
    return run;
  }

  const Axis outer = spec.order == SplitOrder::XVX ? Axis::X : Axis::V;
  const Axis inner = outer == Axis::X ? Axis::V : Axis::X;
  auto speed_of = [&](Axis a) {
    return [&, a](std::size_t line) { return a == Axis::X ? g.v(line) : force.f(g.x(line)); };
  };
  const bool v_trivial = force.is_free();
  const auto outer_half = detail::advection_table(ws, outer, speed_of(outer), 0.5 * spec.dt);
  const auto outer_full = detail::advection_table(ws, outer, speed_of(outer), spec.dt);
  const auto inner_full = detail::advection_table(ws, inner, speed_of(inner), spec.dt);
  auto advect = [&](std::vector<Complex>& data, Axis a, const std::vector<Complex>& table) {
    if (a == Axis::V && v_trivial) return;
    ws.apply_table(data, a, table);
  };

  WaveFunction2D s = wf;
  bool open = false;  // the closing outer half-step of the previous step is still owed
  for (std::size_t step = 1; step <= spec.n_steps; ++step) {
    advect(s.amps, outer, open ? outer_full : outer_half);
    advect(s.amps, inner, inner_full);
    const bool rec = step % spec.record_every == 0;
    const bool snap = spec.snapshot_every && step % spec.snapshot_every == 0;
    if (rec || snap || step == spec.n_steps) {
      advect(s.amps, outer, outer_half);
      open = false;
      const double t = static_cast<double>(step) * spec.dt;
      if (rec) record(s, t);
      if (snap) snapshot(s, t);
    } else {
      open = true;
    }
  }
  for (const auto& z : s.amps)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NumericError("evolution produced non-finite amplitudes");
  run.state = std::move(s);
  return run;
}

// ---------------------------------------------------------------------------
// Basic QM and photons

struct Evolution1D {
  WaveFunction1D state;
  ObservableSeries series;
};

/// Standard split-step Fourier solver for H = p^2/2m + V(x): half potential
/// kick, exact kinetic drift in k-space, half kick.
inline Evolution1D evolve_basic_qm(const WaveFunction1D& wf, const ForceField& force, const EvolveSpec& spec,
                                   const PhysicalConstants& pc = {}, const std::string& scenario = {}) {
  spec.validate();
  wf.grid.validate();
  detail::require_unit_norm(norm(wf));
  check_wrap_budget_1d(wf, force, spec.duration(), pc);

  const Grid1D& g = wf.grid;
  const std::size_t n = g.n_x;
  SpectralWorkspace1D ws(g);
  const auto k = ws.k();
  const double m = force.mass(), dt = spec.dt;
  std::vector<Complex> kick_half(n), kick_full(n), drift(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double V = force.potential(g.x(i));
    kick_half[i] = std::polar(1.0, -V * 0.5 * dt / pc.hbar);
    kick_full[i] = std::polar(1.0, -V * dt / pc.hbar);
  }
  for (std::size_t q = 0; q < n; ++q) drift[q] = std::polar(1.0, -pc.hbar * k[q] * k[q] * dt / (2.0 * m));

  Evolution1D run;
  run.series.meta = {scenario, summarize(g), dt};
  run.series.records.push_back(measure_1d(wf, ws, pc, &force, 0.0));
  std::vector<Complex> s = wf.amps;
  bool open = false;
  for (std::size_t step = 1; step <= spec.n_steps; ++step) {
    const auto& kick = open ? kick_full : kick_half;
    for (std::size_t i = 0; i < n; ++i) s[i] *= kick[i];
    ws.apply_multiplier(s, [&](std::size_t q) { return drift[q]; });
    if (step % spec.record_every == 0 || step == spec.n_steps) {
      for (std::size_t i = 0; i < n; ++i) s[i] *= kick_half[i];
      open = false;
      if (step % spec.record_every == 0)
        run.series.records.push_back(
            measure_1d(WaveFunction1D(g, s), ws, pc, &force, static_cast<double>(step) * dt));
    } else {
      open = true;
    }
  }
  run.state = WaveFunction1D(g, std::move(s));
  return run;
}

/// Single-photon amplitude under H = s c p: exact spectral advection at
/// speed s c. Wrapping around the periodic domain is allowed. Every step is
/// the same diagonal phase, so the steps between two records are applied as
/// one multiplication.
inline Evolution1D evolve_photon(const WaveFunction1D& wf, int direction, double c_speed, const EvolveSpec& spec,
                                 const PhysicalConstants& pc = {}, const std::string& scenario = {}) {
  spec.validate();
  wf.grid.validate();
  if (direction != 1 && direction != -1) throw ArgumentError("evolve_photon: direction must be +1 or -1");
  if (!(c_speed > 0.0) || !std::isfinite(c_speed)) throw ArgumentError("evolve_photon: c must be positive");
  detail::require_unit_norm(norm(wf));

  const Grid1D& g = wf.grid;
  SpectralWorkspace1D ws(g);
  const auto k = ws.k();
  const double vel = direction * c_speed;
  const double block = spec.dt * static_cast<double>(spec.record_every);
  std::vector<Complex> phase(g.n_x);
  for (std::size_t q = 0; q < g.n_x; ++q) phase[q] = std::polar(1.0, -k[q] * vel * block);

  auto rec = [&](const std::vector<Complex>& s, double t) {
    auto r = measure_1d(WaveFunction1D(g, s), ws, pc, nullptr, t);
    r.mean_v = vel;
    r.std_v = 0.0;
    return r;
  };
  Evolution1D run;
  run.series.meta = {scenario, summarize(g), spec.dt};
  run.series.records.push_back(rec(wf.amps, 0.0));
  std::vector<Complex> s = wf.amps;
  for (std::size_t step = spec.record_every; step <= spec.n_steps; step += spec.record_every) {
    ws.apply_multiplier(s, [&](std::size_t q) { return phase[q]; });
    run.series.records.push_back(rec(s, static_cast<double>(step) * spec.dt));
  }
  run.state = WaveFunction1D(g, std::move(s));
  return run;
}

}  // namespace cfgqm

#endif  // CFGQM_PROPAGATORS_HPP
