#ifndef CFGQM_SCENARIOS_HPP
#define CFGQM_SCENARIOS_HPP

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfgqm/classical.hpp"
#include "cfgqm/config.hpp"
#include "cfgqm/errors.hpp"
#include "cfgqm/io.hpp"
#include "cfgqm/observables.hpp"
#include "cfgqm/propagators.hpp"
#include "cfgqm/spectra.hpp"
#include "cfgqm/wavefunction.hpp"

namespace cfgqm {

// ---------------------------------------------------------------------------
// Built-in scenario library

namespace detail {

inline const std::vector<std::pair<std::string_view, std::string_view>>& builtin_table() {
  static const std::vector<std::pair<std::string_view, std::string_view>> table = {
      {"free", R"(name = "free"
kind = "configuration"
comparisons = ["classical", "characteristics"]

[grid]
x_min = -8.0
x_max = 8.0
n_x = 256
v_min = -8.0
v_max = 8.0
n_v = 256

[force]
kind = "free"
mass = 1.0

[[initial]]
x0 = -2.0
v0 = 2.0
sigma_x = 0.5
sigma_v = 0.5

[evolve]
dt = 0.001
n_steps = 1000
record_every = 10
)"},
      {"free-fall", R"(name = "free-fall"
kind = "configuration"
comparisons = ["classical"]

[grid]
x_min = -6.0
x_max = 14.0
n_x = 256
v_min = -6.0
v_max = 18.0
n_v = 256

[force]
kind = "uniform"
mass = 1.0
g = 9.81

[[initial]]
x0 = 0.0
v0 = 0.0
sigma_x = 0.5
sigma_v = 0.5

[evolve]
dt = 0.001
n_steps = 1000
record_every = 10
)"},
      {"harmonic", R"(name = "harmonic"
kind = "configuration"
comparisons = ["classical"]

[grid]
x_min = -8.0
x_max = 8.0
n_x = 256
v_min = -8.0
v_max = 8.0
n_v = 256

[force]
kind = "harmonic"
mass = 1.0
omega = 1.0

[[initial]]
x0 = 1.0
v0 = 0.0
sigma_x = 0.5
sigma_v = 0.5

# one full period, 2 pi
[evolve]
duration = 6.283185307179586
n_steps = 6284
record_every = 4
)"},
      {"photon", R"(name = "photon"
kind = "photon"
comparisons = ["photon"]

# only the x axis is used
[grid]
x_min = -8.0
x_max = 8.0
n_x = 256
v_min = -8.0
v_max = 8.0
n_v = 256

[[initial]]
x0 = 0.0
v0 = 1.0
sigma_x = 0.5
sigma_v = 0.5

[photon]
direction = 1
c = 1.0

# c t = 8, half the domain
[evolve]
dt = 0.0008
n_steps = 10000
record_every = 100
)"},
      {"emergence", R"(name = "emergence"
kind = "emergence"

[grid]
x_min = -8.0
x_max = 8.0
n_x = 256
v_min = -8.0
v_max = 8.0
n_v = 256

[force]
kind = "harmonic"
mass = 1.0
omega = 1.0

[[initial]]
x0 = 1.0
v0 = 0.0
sigma_x = 0.5
sigma_v = 0.5

[evolve]
duration = 6.283185307179586
n_steps = 6284
record_every = 4
)"},
      {"emergence-free", R"(name = "emergence-free"
kind = "emergence"

[grid]
x_min = -8.0
x_max = 8.0
n_x = 256
v_min = -8.0
v_max = 8.0
n_v = 256

[force]
kind = "free"
mass = 2.0

[[initial]]
x0 = -1.0
v0 = 1.0
sigma_x = 0.5
sigma_v = 0.5

[evolve]
dt = 0.001
n_steps = 1000
record_every = 10
)"},
      {"emergence-free-fall", R"(name = "emergence-free-fall"
kind = "emergence"

[grid]
x_min = -6.0
x_max = 14.0
n_x = 256
v_min = -6.0
v_max = 18.0
n_v = 256

[force]
kind = "uniform"
mass = 1.0
g = 9.81

[[initial]]
x0 = 0.0
v0 = 0.0
sigma_x = 0.5
sigma_v = 0.5

[evolve]
dt = 0.001
n_steps = 1000
record_every = 10
)"},
      {"mixture", R"(name = "mixture"
kind = "configuration"
comparisons = ["classical"]

[grid]
x_min = -8.0
x_max = 8.0
n_x = 256
v_min = -8.0
v_max = 8.0
n_v = 256

[force]
kind = "harmonic"
mass = 1.0
omega = 1.0

# three packets on a circle of radius 3, 120 degrees apart
[[initial]]
x0 = 3.0
v0 = 0.0
sigma_x = 0.4
sigma_v = 0.4
weight = 0.5

[[initial]]
x0 = -1.5
v0 = 2.598076211353316
sigma_x = 0.4
sigma_v = 0.4
weight = 0.3

[[initial]]
x0 = -1.5
v0 = -2.598076211353316
sigma_x = 0.4
sigma_v = 0.4
weight = 0.2

[evolve]
dt = 0.001
n_steps = 2000
record_every = 10
)"},
      {"dispersion", R"(name = "dispersion"
kind = "dispersion"
comparisons = ["basic_qm"]
# sigma_v is two velocity cells
min_width_cells = 2.0

[grid]
x_min = -8.0
x_max = 8.0
n_x = 256
v_min = -8.0
v_max = 8.0
n_v = 256

[force]
kind = "free"
mass = 1.0

[[initial]]
x0 = 0.0
v0 = 0.0
sigma_x = 0.5
sigma_v = 0.125

[evolve]
dt = 0.001
n_steps = 1000
record_every = 10
)"},
  };
  return table;
}

}  // namespace detail

inline std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : detail::builtin_table()) out.emplace_back(name);
  return out;
}

inline std::string builtin_scenario_toml(std::string_view name) {
  for (const auto& [n, text] : detail::builtin_table())
    if (n == name) return std::string(text);
  throw UnknownScenarioError("no built-in scenario named '" + std::string(name) + "'");
}

inline ScenarioConfig builtin_scenario(std::string_view name, const std::vector<std::string>& overrides = {}) {
  return parse_config(builtin_scenario_toml(name), overrides, name);
}

// ---------------------------------------------------------------------------
// Initial states

inline WaveFunction2D initial_state(const ScenarioConfig& c) {
  const auto packets = c.packets();
  if (packets.size() == 1) return gaussian_packet(c.grid, packets[0], c.constants(), c.min_width_cells);
  const auto w = c.weights();
  return superpose(c.grid, packets, w, c.constants(), c.min_width_cells);
}

/// Basic-QM state on the p = m v slice: the square root of the position
/// marginal of `wf`, times e^{i m v0 x / hbar}.
inline WaveFunction1D slice_to_basic_qm(const WaveFunction2D& wf, double mass, double v0, const PhysicalConstants& pc) {
  const Grid2D& g = wf.grid;
  WaveFunction1D out(Grid1D{g.x_min, g.x_max, g.n_x});
  for (std::size_t i = 0; i < g.n_x; ++i) {
    double rho = 0.0;
    for (std::size_t j = 0; j < g.n_v; ++j) rho += std::norm(wf.at(i, j));
    out.amps[i] = std::sqrt(rho * g.dv()) * std::polar(1.0, mass * v0 * g.x(i) / pc.hbar);
  }
  return normalized(std::move(out));
}

inline WaveFunction1D photon_initial_state(const ScenarioConfig& c) {
  const auto& p = c.initial.at(0).params;
  return gaussian_packet_1d(c.grid_1d(), p.x0, p.sigma_x, p.p0, c.constants(), c.min_width_cells);
}

/// Initial photon packet moved rigidly by `shift`, sampled on the periodic grid.
inline WaveFunction1D photon_shifted_reference(const ScenarioConfig& c, double shift) {
  const auto& p = c.initial.at(0).params;
  const Grid1D g = c.grid_1d();
  const double L = g.x_max - g.x_min;
  WaveFunction1D wf(g);
  for (std::size_t i = 0; i < g.n_x; ++i) {
    double d = g.x(i) - shift - p.x0;
    d -= L * std::round(d / L);
    wf.amps[i] = std::exp(-d * d / (4.0 * p.sigma_x * p.sigma_x)) * std::polar(1.0, p.p0 * (p.x0 + d) / c.hbar);
  }
  return normalized(std::move(wf));
}

/// Validation plus every wrap-budget precheck the scenario will run.
inline void check_scenario(const ScenarioConfig& c) {
  c.validate();
  const double T = c.evolve_spec().duration();
  const auto pc = c.constants();
  switch (c.kind) {
    case ScenarioKind::Photon: {
      const auto wf = photon_initial_state(c);
      if (!is_interior(wf)) throw DomainError("photon: initial support touches the periodic boundary");
      break;
    }
    case ScenarioKind::Configuration:
    case ScenarioKind::Emergence:
    case ScenarioKind::Dispersion: {
      const auto force = c.force.build();
      const auto wf = initial_state(c);
      check_wrap_budget(wf, force, T);
      const bool bqm = c.kind != ScenarioKind::Configuration || c.compares("basic_qm");
      if (bqm) {
        const auto& p = c.initial[0].params;
        const auto w1 = c.kind == ScenarioKind::Dispersion
                            ? gaussian_packet_1d(c.grid_1d(), p.x0, p.sigma_x, force.mass() * p.v0, pc, c.min_width_cells)
                            : slice_to_basic_qm(wf, force.mass(), p.v0, pc);
        check_wrap_budget_1d(w1, force, T, pc);
      }
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// Comparisons

struct EmergenceReport {
  ObservableSeries cfg;
  ObservableSeries bqm;
  double x_max_diff = 0.0;             // max_t |<x>_cfg - <x>_bqm|
  double p_map_residual = 0.0;         // max_t |<p>_bqm - m <v>_cfg|
  double p_cfg_drift = 0.0;            // max_t |<p>_cfg(t) - <p>_cfg(0)|
  double momentum_divergence = 0.0;    // max_t |<p>_bqm - <p>_cfg|
  double p_bqm_growth_residual = kNaN; // max_t |<p>_bqm(t) - <p>_bqm(0) - m g t|, constant forces only
};

inline EmergenceReport compare_emergence(ObservableSeries cfg, ObservableSeries bqm, const ForceField& force) {
  if (cfg.records.size() != bqm.records.size()) throw ArgumentError("compare_emergence: series lengths differ");
  EmergenceReport r;
  const double m = force.mass();
  double g = kNaN;
  if (force.is_free()) g = 0.0;
  if (const auto* u = std::get_if<UniformForce>(&force.kind())) g = u->g;
  if (!std::isnan(g)) r.p_bqm_growth_residual = 0.0;
  const auto& c = cfg.records;
  const auto& b = bqm.records;
  for (std::size_t k = 0; k < c.size(); ++k) {
    r.x_max_diff = std::max(r.x_max_diff, std::abs(c[k].mean_x - b[k].mean_x));
    r.p_map_residual = std::max(r.p_map_residual, std::abs(b[k].mean_p - m * c[k].mean_v));
    r.p_cfg_drift = std::max(r.p_cfg_drift, std::abs(c[k].mean_p - c[0].mean_p));
    r.momentum_divergence = std::max(r.momentum_divergence, std::abs(b[k].mean_p - c[k].mean_p));
    if (!std::isnan(g))
      r.p_bqm_growth_residual =
          std::max(r.p_bqm_growth_residual, std::abs(b[k].mean_p - b[0].mean_p - m * g * b[k].t));
  }
  r.cfg = std::move(cfg);
  r.bqm = std::move(bqm);
  return r;
}

inline EmergenceReport run_emergence_comparison(const ScenarioConfig& c) {
  c.validate();
  if (c.initial.size() != 1) throw ArgumentError("emergence comparison needs a single Gaussian");
  if (c.force.kind != "free" && c.force.kind != "harmonic" && c.force.kind != "uniform")
    throw ArgumentError("emergence comparison supports free, uniform and harmonic forces, not '" + c.force.kind + "'");
  const auto force = c.force.build();
  const auto pc = c.constants();
  const auto spec = c.evolve_spec();
  const auto wf = initial_state(c);
  const auto w1 = slice_to_basic_qm(wf, force.mass(), c.initial[0].params.v0, pc);
  check_wrap_budget(wf, force, spec.duration());
  check_wrap_budget_1d(w1, force, spec.duration(), pc);
  auto cfg = evolve_config_space(wf, force, spec, pc, c.name);
  auto bqm = evolve_basic_qm(w1, force, spec, pc, c.name);
  return compare_emergence(std::move(cfg.series), std::move(bqm.series), force);
}

struct DispersionReport {
  ObservableSeries cfg;
  ObservableSeries bqm;
  std::vector<double> times, dx_cfg, dx_cfg_law, dx_bqm, dx_bqm_law;
  double max_cfg_deviation = 0.0;
  double max_bqm_deviation = 0.0;
  bool laws_hold = false;  // both deviations within 1e-4
};

inline constexpr double kDispersionTolerance = 1e-4;

/// Position spread of a basic-QM Gaussian against sqrt(dx0^2 + (dp0 t / m)^2)
/// and of a configuration-space Gaussian against the shear law
/// sqrt(dx0^2 + (dv0 t)^2), both from the measured initial spreads.
inline DispersionReport run_dispersion_comparison(const ScenarioConfig& c) {
  c.validate();
  if (c.force.kind != "free") throw ArgumentError("dispersion comparison needs a free force");
  if (c.initial.size() != 1) throw ArgumentError("dispersion comparison needs a single Gaussian");
  const auto force = c.force.build();
  const auto pc = c.constants();
  const auto spec = c.evolve_spec();
  const auto& p = c.initial[0].params;
  const auto wf = initial_state(c);
  const auto w1 = gaussian_packet_1d(c.grid_1d(), p.x0, p.sigma_x, force.mass() * p.v0, pc, c.min_width_cells);
  check_wrap_budget(wf, force, spec.duration());
  check_wrap_budget_1d(w1, force, spec.duration(), pc);

  DispersionReport r;
  r.cfg = evolve_config_space(wf, force, spec, pc, c.name).series;
  r.bqm = evolve_basic_qm(w1, force, spec, pc, c.name).series;
  const auto& a = r.cfg.records;
  const auto& b = r.bqm.records;
  const double m = force.mass();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k].t;
    r.times.push_back(t);
    r.dx_cfg.push_back(a[k].std_x);
    r.dx_cfg_law.push_back(std::hypot(a[0].std_x, a[0].std_v * t));
    r.dx_bqm.push_back(b[k].std_x);
    r.dx_bqm_law.push_back(std::hypot(b[0].std_x, b[0].std_p * t / m));
    r.max_cfg_deviation = std::max(r.max_cfg_deviation, std::abs(r.dx_cfg.back() - r.dx_cfg_law.back()));
    r.max_bqm_deviation = std::max(r.max_bqm_deviation, std::abs(r.dx_bqm.back() - r.dx_bqm_law.back()));
  }
  r.laws_hold = r.max_cfg_deviation <= kDispersionTolerance && r.max_bqm_deviation <= kDispersionTolerance;
  return r;
}

// ---------------------------------------------------------------------------
// Runner

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool write_files = true;
};

struct RunReport {
  std::string name;
  ScenarioKind kind = ScenarioKind::Configuration;
  ObservableSeries series;      // configuration-space or photon series
  ObservableSeries bqm_series;  // filled when a basic-QM run took place
  std::map<std::string, double> metrics;
  std::map<std::string, bool> checks;
  std::vector<std::string> files;
  std::vector<double> spectrum;

  double metric(const std::string& key) const {
    auto it = metrics.find(key);
    if (it == metrics.end()) throw ArgumentError("run report has no metric '" + key + "'");
    return it->second;
  }

  std::string to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["kind"] = to_string(kind);
    j["metrics"] = metrics;
    j["checks"] = checks;
    j["records"] = series.records.size();
    j["files"] = files;
    return j.dump(2) + "\n";
  }
};

namespace detail {

inline void series_metrics(const ObservableSeries& s, double hbar, std::map<std::string, double>& m,
                           const std::string& prefix) {
  const auto& r = s.records;
  double norm_drift = 0.0, xp = INFINITY, va = INFINITY, e_max = 0.0;
  for (const auto& q : r) {
    norm_drift = std::max(norm_drift, std::abs(q.norm - r[0].norm));
    xp = std::min(xp, q.std_x * q.std_p - 0.5 * hbar);
    if (!std::isnan(q.std_a)) va = std::min(va, q.std_v * q.std_a - 0.5 * hbar);
    if (!std::isnan(q.energy_class)) e_max = std::max(e_max, std::abs(q.energy_class - r[0].energy_class));
  }
  m[prefix + "norm_drift"] = norm_drift;
  m[prefix + "min_xp_excess"] = xp;
  if (std::isfinite(va)) m[prefix + "min_va_excess"] = va;
  if (!std::isnan(r.back().energy_class) && r[0].energy_class != 0.0) {
    m[prefix + "energy_drift_relative"] = std::abs(r.back().energy_class - r[0].energy_class) / std::abs(r[0].energy_class);
    m[prefix + "energy_drift_max_relative"] = e_max / std::abs(r[0].energy_class);
  }
  m[prefix + "final_mean_x"] = r.back().mean_x;
  m[prefix + "final_mean_v"] = r.back().mean_v;
  m[prefix + "final_mean_p"] = r.back().mean_p;
  if (!std::isnan(r.back().mean_a)) m[prefix + "final_mean_a"] = r.back().mean_a;
  if (!std::isnan(r.back().mean_vp)) m[prefix + "final_mean_vp"] = r.back().mean_vp;
  if (!std::isnan(r.back().mean_fa)) m[prefix + "final_mean_fa"] = r.back().mean_fa;
}

inline void ehrenfest_metrics(const ObservableSeries& s, const ForceField& force, const PhysicalConstants& pc,
                              std::map<std::string, double>& m) {
  if (s.records.size() < 5) return;
  const auto e = ehrenfest_residuals(s, force, pc);
  m["ehrenfest_position"] = e.position;
  m["ehrenfest_velocity"] = e.velocity;
  m["ehrenfest_momentum"] = e.momentum;
  m["ehrenfest_acceleratum"] = e.acceleratum;
  m["ehrenfest_max"] = e.max_residual();
}

/// Max over records of max(|<x> - x_ref|, |<v> - v_ref|) against RK4
/// references, plus the smallest phase-space separation between packets in
/// units of the largest packet width.
inline void classical_metrics(const ScenarioConfig& c, const ForceField& force, const EvolveSpec& spec,
                              const ObservableSeries& s, std::map<std::string, double>& m) {
  std::vector<Trajectory> trs;
  for (const auto& p : c.initial)
    trs.push_back(classical_trajectory({p.params.x0, p.params.v0}, force, spec.dt, spec.n_steps));
  const auto w = c.weights();
  const auto ref = mixture_reference(w, trs);
  double dev = 0.0;
  for (std::size_t k = 0; k < s.records.size(); ++k) {
    const std::size_t step = k * spec.record_every;
    dev = std::max({dev, std::abs(s.records[k].mean_x - ref.x[step]), std::abs(s.records[k].mean_v - ref.v[step])});
  }
  m[c.initial.size() == 1 ? "classical_max_deviation" : "mixture_max_deviation"] = dev;
  if (c.initial.size() > 1) {
    double sigma = 0.0;
    for (const auto& p : c.initial) sigma = std::max({sigma, p.params.sigma_x, p.params.sigma_v});
    double sep = INFINITY;
    for (std::size_t k = 0; k < ref.times.size(); ++k)
      for (std::size_t a = 0; a < trs.size(); ++a)
        for (std::size_t b = a + 1; b < trs.size(); ++b)
          sep = std::min(sep, std::hypot(trs[a].states[k].x - trs[b].states[k].x, trs[a].states[k].v - trs[b].states[k].v));
    m["min_separation_sigma"] = sep / sigma;
  }
}

inline void emergence_metrics(const EmergenceReport& e, std::map<std::string, double>& m) {
  m["emergence_x_max_diff"] = e.x_max_diff;
  m["emergence_p_map_residual"] = e.p_map_residual;
  m["emergence_p_cfg_drift"] = e.p_cfg_drift;
  m["emergence_momentum_divergence"] = e.momentum_divergence;
  if (!std::isnan(e.p_bqm_growth_residual)) m["emergence_p_bqm_growth_residual"] = e.p_bqm_growth_residual;
}

inline std::string sibling(const std::string& series_name, const std::string& suffix) {
  const auto dot = series_name.rfind('.');
  const std::string stem = dot == std::string::npos ? series_name : series_name.substr(0, dot);
  return stem + suffix;
}

}  // namespace detail

/// Runs a scenario end to end: prechecks, the primary evolution, the
/// requested comparisons and (optionally) the output files. Identical configs
/// give byte-identical files.
inline RunReport run_scenario(const ScenarioConfig& c, const RunOptions& opt = {}) {
  check_scenario(c);
  const auto pc = c.constants();
  const auto spec = c.evolve_spec();
  RunReport rep;
  rep.name = c.name;
  rep.kind = c.kind;
  auto& m = rep.metrics;

  std::vector<std::pair<std::string, std::string>> outputs;  // file name, bytes
  const std::string series_name = c.outputs.series.empty() ? c.name + ".csv" : c.outputs.series;

  if (c.kind == ScenarioKind::Photon) {
    const auto wf = photon_initial_state(c);
    auto run = evolve_photon(wf, c.photon.direction, c.photon.c, spec, pc, c.name);
    rep.series = std::move(run.series);
    detail::series_metrics(rep.series, c.hbar, m, "");
    if (c.compares("photon")) {
      const double shift = c.photon.direction * c.photon.c * spec.duration();
      m["photon_shift_l2_distance"] = l2_distance(run.state, photon_shifted_reference(c, shift));
    }
  } else {
    const auto force = c.force.build();
    if (c.kind == ScenarioKind::Dispersion) {
      auto d = run_dispersion_comparison(c);
      m["dispersion_max_cfg_deviation"] = d.max_cfg_deviation;
      m["dispersion_max_bqm_deviation"] = d.max_bqm_deviation;
      rep.checks["dispersion_laws_hold"] = d.laws_hold;
      rep.series = std::move(d.cfg);
      rep.bqm_series = std::move(d.bqm);
    } else if (c.kind == ScenarioKind::Emergence) {
      auto e = run_emergence_comparison(c);
      detail::emergence_metrics(e, m);
      rep.series = std::move(e.cfg);
      rep.bqm_series = std::move(e.bqm);
    } else {
      const auto wf = initial_state(c);
      auto run = evolve_config_space(wf, force, spec, pc, c.name);
      rep.series = std::move(run.series);
      if (c.compares("characteristics")) {
        const auto oracle = evolve_characteristics(wf, force, spec.duration(), spec.workers);
        m["characteristics_l2_distance"] = l2_distance(run.state, oracle);
      }
      if (c.compares("basic_qm")) {
        const auto w1 = slice_to_basic_qm(wf, force.mass(), c.initial[0].params.v0, pc);
        auto b = evolve_basic_qm(w1, force, spec, pc, c.name);
        auto e = compare_emergence(rep.series, std::move(b.series), force);
        detail::emergence_metrics(e, m);
        rep.bqm_series = std::move(e.bqm);
      }
    }
    detail::series_metrics(rep.series, c.hbar, m, "");
    if (!rep.bqm_series.records.empty()) detail::series_metrics(rep.bqm_series, c.hbar, m, "bqm_");
    detail::ehrenfest_metrics(rep.series, force, pc, m);
    if (c.compares("classical")) detail::classical_metrics(c, force, spec, rep.series, m);

    if (c.outputs.spectrum) {
      const auto h = build_hdyn_matrix(c.grid, force, pc);
      const auto heng = energy_observable(h);
      rep.spectrum = eigenvalues(h);
      const auto e_eng = eigenvalues(heng);
      m["spectrum_min"] = rep.spectrum.front();
      m["spectrum_max"] = rep.spectrum.back();
      m["hdyn_hermiticity_defect"] = hermiticity_defect(h.entries);
      m["heng_min_eigenvalue"] = e_eng.front();
      m["heng_commutator_max"] = commutator_max(heng.entries, h.entries);
    }
    for (const auto& s : rep.series.snapshots) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "_snap_%08lld.bin", std::llround(s.t / spec.dt));
      outputs.emplace_back(c.name + buf, snapshot_bytes(s.wf, s.t));
    }
  }

  outputs.emplace_back(series_name, series_csv(rep.series));
  if (!rep.bqm_series.records.empty())
    outputs.emplace_back(detail::sibling(series_name, "_bqm.csv"), series_csv(rep.bqm_series));
  if (c.outputs.spectrum) outputs.emplace_back(c.name + "_spectrum.csv", spectrum_csv(rep.spectrum));
  for (const auto& [name, bytes] : outputs) rep.files.push_back(name);
  rep.files.push_back(c.name + "_report.json");
  rep.series.snapshots.clear();

  if (opt.write_files) {
    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + opt.out_dir.string() + "': " + ec.message());
    for (const auto& [name, bytes] : outputs) write_file((opt.out_dir / name).string(), bytes);
    write_file((opt.out_dir / (c.name + "_report.json")).string(), rep.to_json());
  }
  return rep;
}

}  // namespace cfgqm

#endif  // CFGQM_SCENARIOS_HPP
