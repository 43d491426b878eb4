#ifndef CFGQM_OBSERVABLES_HPP
#define CFGQM_OBSERVABLES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cfgqm/classical.hpp"
#include "cfgqm/errors.hpp"
#include "cfgqm/force.hpp"
#include "cfgqm/operators.hpp"
#include "cfgqm/wavefunction.hpp"

namespace cfgqm {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One row of an observable time series. Quantities that do not exist for a
/// given solver (the acceleratum in basic QM, say) are NaN.
struct ObservableRecord {
  double t = 0.0;
  double mean_x = kNaN, mean_v = kNaN, mean_p = kNaN, mean_a = kNaN;
  double std_x = kNaN, std_v = kNaN, std_p = kNaN, std_a = kNaN;
  double energy_class = kNaN;
  double norm = kNaN;
  // <f(x)> and <f'(x) a>, kept for the Ehrenfest checks. Not written to CSV.
  double mean_f = kNaN;
  double mean_fprime_a = kNaN;
  // <v p> and <f(x) a>: logged only, no identity constrains them.
  double mean_vp = kNaN;
  double mean_fa = kNaN;
};

struct Snapshot {
  double t = 0.0;
  WaveFunction2D wf;
};

struct SeriesMetadata {
  std::string scenario;
  std::string grid_summary;
  double dt = 0.0;
};

struct ObservableSeries {
  SeriesMetadata meta;
  std::vector<ObservableRecord> records;
  std::vector<Snapshot> snapshots;
};

inline std::string summarize(const Grid2D& g) {
  return "x[" + std::to_string(g.x_min) + "," + std::to_string(g.x_max) + ")x" + std::to_string(g.n_x) + " v[" +
         std::to_string(g.v_min) + "," + std::to_string(g.v_max) + ")x" + std::to_string(g.n_v);
}

inline std::string summarize(const Grid1D& g) {
  return "x[" + std::to_string(g.x_min) + "," + std::to_string(g.x_max) + ")x" + std::to_string(g.n_x);
}

struct Expectation {
  double value = 0.0;
  double imag = 0.0;  // Hermiticity diagnostic
};

inline constexpr double kNormTolerance = 1e-8;
inline constexpr double kHermiticityTolerance = 1e-10;

namespace detail {

inline void require_normalized(const WaveFunction2D& wf) {
  const double n = norm(wf);
  if (std::abs(n - 1.0) > kNormTolerance)
    throw PreconditionError("expectation values need a normalized state (norm = " + std::to_string(n) + ")");
}

}  // namespace detail

/// <psi|A psi> with its imaginary part kept as a diagnostic.
inline Expectation expect_detailed(const WaveFunction2D& wf, ObservableTag tag, const SpectralWorkspace& ws,
                                   const PhysicalConstants& pc = {}, const ForceField* force = nullptr) {
  detail::require_normalized(wf);
  const auto z = inner_product(wf, apply_operator(tag, wf, ws, pc, force));
  return {z.real(), z.imag()};
}

inline double expect(const WaveFunction2D& wf, ObservableTag tag, const SpectralWorkspace& ws,
                     const PhysicalConstants& pc = {}, const ForceField* force = nullptr) {
  const auto e = expect_detailed(wf, tag, ws, pc, force);
  if (std::abs(e.imag) > kHermiticityTolerance * std::max(1.0, std::abs(e.value)))
    throw NumericError(std::string("expect: imaginary part too large for ") + to_string(tag));
  return e.value;
}

inline double expect(const WaveFunction2D& wf, ObservableTag tag, const PhysicalConstants& pc = {},
                     const ForceField* force = nullptr) {
  SpectralWorkspace ws(wf.grid);
  return expect(wf, tag, ws, pc, force);
}

namespace detail {

// sqrt(<A^2> - <A>^2); tiny negative radicands from rounding are clamped.
inline double spread(double mean, double mean_sq) {
  const double r = mean_sq - mean * mean;
  if (r < -1e-12 * std::max(1.0, mean_sq)) throw NumericError("uncertainty: negative variance");
  return std::sqrt(std::max(0.0, r));
}

}  // namespace detail

/// Delta A = sqrt(<A^2> - <A>^2), with <A^2> = ||A psi||^2 for these Hermitian A.
inline double uncertainty(const WaveFunction2D& wf, ObservableTag tag, const SpectralWorkspace& ws,
                          const PhysicalConstants& pc = {}, const ForceField* force = nullptr) {
  detail::require_normalized(wf);
  const auto a = apply_operator(tag, wf, ws, pc, force);
  const double mean = inner_product(wf, a).real();
  const double mean_sq = detail::sum_abs2(a.amps) * wf.cell();
  return detail::spread(mean, mean_sq);
}

inline double uncertainty(const WaveFunction2D& wf, ObservableTag tag, const PhysicalConstants& pc = {},
                          const ForceField* force = nullptr) {
  SpectralWorkspace ws(wf.grid);
  return uncertainty(wf, tag, ws, pc, force);
}

/// Every recorded quantity for one configuration-space state, in a single
/// pass plus one transform along each axis. Accumulation order is fixed.
inline ObservableRecord measure(const WaveFunction2D& wf, const SpectralWorkspace& ws, const PhysicalConstants& pc,
                                const ForceField* force, double t) {
  const Grid2D& g = wf.grid;
  WaveFunction2D p = wf, a = wf;
  apply_momentum_inplace(p.amps, ws, pc.hbar);
  apply_acceleratum_inplace(a.amps, ws, pc.hbar);

  double n2 = 0, sx = 0, sxx = 0, sv = 0, svv = 0, sp = 0, spp = 0, sa = 0, saa = 0, se = 0, sf = 0, sfa = 0, svp = 0,
         sfa2 = 0;
  for (std::size_t i = 0; i < g.n_x; ++i) {
    const double x = g.x(i);
    const double fx = force ? force->f(x) : 0.0;
    const double fpx = force ? force->fprime(x) : 0.0;
    const double vx = force ? force->potential(x) : 0.0;
    for (std::size_t j = 0; j < g.n_v; ++j) {
      const double v = g.v(j);
      const Complex psi = wf.at(i, j), pp = p.at(i, j), aa = a.at(i, j);
      const double rho = std::norm(psi);
      n2 += rho;
      sx += x * rho;
      sxx += x * x * rho;
      sv += v * rho;
      svv += v * v * rho;
      const double cp = (std::conj(psi) * pp).real();
      sp += cp;
      svp += v * cp;
      spp += std::norm(pp);
      const double ca = (std::conj(psi) * aa).real();
      sa += ca;
      saa += std::norm(aa);
      if (force) {
        se += (0.5 * force->mass() * v * v + vx) * rho;
        sf += fx * rho;
        sfa += fpx * ca;
        sfa2 += fx * ca;
      }
    }
  }
  const double c = wf.cell();
  ObservableRecord r;
  r.t = t;
  r.norm = std::sqrt(n2 * c);
  r.mean_x = sx * c;
  r.mean_v = sv * c;
  r.mean_p = sp * c;
  r.mean_a = sa * c;
  r.std_x = detail::spread(r.mean_x, sxx * c);
  r.std_v = detail::spread(r.mean_v, svv * c);
  r.std_p = detail::spread(r.mean_p, spp * c);
  r.std_a = detail::spread(r.mean_a, saa * c);
  r.mean_vp = svp * c;
  if (force) {
    r.mean_fa = sfa2 * c;
    r.energy_class = se * c;
    r.mean_f = sf * c;
    r.mean_fprime_a = sfa * c;
  }
  return r;
}

/// Records for one-dimensional states. For basic QM the velocity columns hold
/// <p>/m and Delta p/m and the energy is <p^2>/2m + <V>; pass force = nullptr
/// (photon) to leave mass-dependent columns empty.
inline ObservableRecord measure_1d(const WaveFunction1D& wf, const SpectralWorkspace1D& ws, const PhysicalConstants& pc,
                                   const ForceField* force, double t) {
  const Grid1D& g = wf.grid;
  std::vector<Complex> p = wf.amps;
  const auto k = ws.k();
  ws.apply_multiplier(p, [&](std::size_t m) { return Complex(pc.hbar * odd_derivative_k(k, m)); });
  double n2 = 0, sx = 0, sxx = 0, sp = 0, spp = 0, sv = 0, sf = 0;
  for (std::size_t i = 0; i < g.n_x; ++i) {
    const double x = g.x(i);
    const double rho = std::norm(wf.amps[i]);
    n2 += rho;
    sx += x * rho;
    sxx += x * x * rho;
    sp += (std::conj(wf.amps[i]) * p[i]).real();
    spp += std::norm(p[i]);
    if (force) {
      sv += force->potential(x) * rho;
      sf += force->f(x) * rho;
    }
  }
  const double c = wf.cell();
  ObservableRecord r;
  r.t = t;
  r.norm = std::sqrt(n2 * c);
  r.mean_x = sx * c;
  r.std_x = detail::spread(r.mean_x, sxx * c);
  r.mean_p = sp * c;
  r.std_p = detail::spread(r.mean_p, spp * c);
  if (force) {
    const double m = force->mass();
    r.mean_v = r.mean_p / m;
    r.std_v = r.std_p / m;
    r.energy_class = spp * c / (2.0 * m) + sv * c;
    r.mean_f = sf * c;
  }
  return r;
}

struct EhrenfestReport {
  // max |d<A>/dt - rhs| over interior records, one per identity:
  double position = 0.0;      // d<x>/dt = <v>
  double velocity = 0.0;      // d<v>/dt = <f(x)>
  double momentum = 0.0;      // d<p>/dt = -<f'(x) a>
  double acceleratum = 0.0;   // d<a>/dt = -<p>
  double record_dt = 0.0;
  // max gap between five- and three-point derivatives (three-point error size).
  double truncation_estimate = 0.0;
  std::size_t samples = 0;

  double max_residual() const { return std::max({position, velocity, momentum, acceleratum}); }
};

/// Checks the expectation-value equations of motion on a uniformly sampled
/// series with five-point central differences. <f(x)> and <f'(x) a> come from the
/// per-record values, or from a stored snapshot when a record lacks them.
inline EhrenfestReport ehrenfest_residuals(const ObservableSeries& series, const ForceField& force,
                                           const PhysicalConstants& pc = {}) {
  const auto& rec = series.records;
  if (rec.size() < 5) throw ArgumentError("ehrenfest_residuals: need at least 5 records");
  const double h = rec[1].t - rec[0].t;
  if (!(h > 0.0)) throw ArgumentError("ehrenfest_residuals: times must increase");
  for (std::size_t k = 1; k < rec.size(); ++k)
    if (std::abs((rec[k].t - rec[k - 1].t) - h) > 1e-9 * h)
      throw ArgumentError("ehrenfest_residuals: sampling is not uniform");

  std::vector<double> mf(rec.size()), mfa(rec.size());
  for (std::size_t k = 0; k < rec.size(); ++k) {
    mf[k] = rec[k].mean_f;
    mfa[k] = rec[k].mean_fprime_a;
    if (std::isnan(mf[k]) || std::isnan(mfa[k])) {
      auto it = std::find_if(series.snapshots.begin(), series.snapshots.end(),
                             [&](const Snapshot& s) { return std::abs(s.t - rec[k].t) <= 1e-12 * std::max(1.0, h); });
      if (it == series.snapshots.end())
        throw ArgumentError("ehrenfest_residuals: record lacks <f> and no snapshot covers it");
      SpectralWorkspace ws(it->wf.grid);
      const auto m = measure(it->wf, ws, pc, &force, it->t);
      mf[k] = m.mean_f;
      mfa[k] = m.mean_fprime_a;
    }
  }

  EhrenfestReport r;
  r.record_dt = h;
  // Fourth-order five-point derivative; the gap to the three-point value is
  // kept as a size indicator of the differencing error.
  auto d5 = [&](auto get, std::size_t k) {
    return (get(rec[k - 2]) - 8.0 * get(rec[k - 1]) + 8.0 * get(rec[k + 1]) - get(rec[k + 2])) / (12.0 * h);
  };
  auto d3 = [&](auto get, std::size_t k) { return (get(rec[k + 1]) - get(rec[k - 1])) / (2.0 * h); };
  const auto gx = [](const ObservableRecord& o) { return o.mean_x; };
  const auto gv = [](const ObservableRecord& o) { return o.mean_v; };
  const auto gp = [](const ObservableRecord& o) { return o.mean_p; };
  const auto ga = [](const ObservableRecord& o) { return o.mean_a; };
  for (std::size_t k = 2; k + 2 < rec.size(); ++k) {
    r.position = std::max(r.position, std::abs(d5(gx, k) - rec[k].mean_v));
    r.velocity = std::max(r.velocity, std::abs(d5(gv, k) - mf[k]));
    r.momentum = std::max(r.momentum, std::abs(d5(gp, k) + mfa[k]));
    r.acceleratum = std::max(r.acceleratum, std::abs(d5(ga, k) + rec[k].mean_p));
    for (auto get : {+gx, +gv, +gp, +ga})
      r.truncation_estimate = std::max(r.truncation_estimate, std::abs(d5(get, k) - d3(get, k)));
    ++r.samples;
  }
  return r;
}

struct MixtureReference {
  std::vector<double> times;
  std::vector<double> x;
  std::vector<double> v;
};

/// Weighted classical means sum_n P_n x_n(t), sum_n P_n v_n(t).
inline MixtureReference mixture_reference(std::span<const double> weights, std::span<const Trajectory> trajectories) {
  if (weights.size() != trajectories.size() || weights.empty())
    throw ArgumentError("mixture_reference: need one weight per trajectory");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ArgumentError("mixture_reference: weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ArgumentError("mixture_reference: weights must sum to 1");
  const std::size_t len = trajectories[0].times.size();
  for (const auto& tr : trajectories)
    if (tr.times.size() != len || tr.states.size() != len)
      throw ArgumentError("mixture_reference: trajectories differ in length");
  MixtureReference ref;
  ref.times = trajectories[0].times;
  ref.x.assign(len, 0.0);
  ref.v.assign(len, 0.0);
  for (std::size_t n = 0; n < weights.size(); ++n)
    for (std::size_t k = 0; k < len; ++k) {
      ref.x[k] += weights[n] * trajectories[n].states[k].x;
      ref.v[k] += weights[n] * trajectories[n].states[k].v;
    }
  return ref;
}

}  // namespace cfgqm

#endif  // CFGQM_OBSERVABLES_HPP
