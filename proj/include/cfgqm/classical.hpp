#ifndef CFGQM_CLASSICAL_HPP
#define CFGQM_CLASSICAL_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "cfgqm/errors.hpp"
#include "cfgqm/force.hpp"

namespace cfgqm {

struct ClassicalState {
  double x = 0.0;
  double v = 0.0;
  bool operator==(const ClassicalState&) const = default;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ClassicalState> states;
};

/// One classic RK4 step of dx/dt = v, dv/dt = f(x). A negative h runs the
/// flow backwards.
inline ClassicalState rk4_step(ClassicalState s, const ForceField& force, double h) {
  const double k1x = s.v, k1v = force.f(s.x);
  const double k2x = s.v + 0.5 * h * k1v, k2v = force.f(s.x + 0.5 * h * k1x);
  const double k3x = s.v + 0.5 * h * k2v, k3v = force.f(s.x + 0.5 * h * k2x);
  const double k4x = s.v + h * k3v, k4v = force.f(s.x + h * k3x);
  return {s.x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x), s.v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
}

inline Trajectory classical_trajectory(ClassicalState s0, const ForceField& force, double dt, std::size_t n_steps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("classical_trajectory: dt must be positive");
  if (!std::isfinite(s0.x) || !std::isfinite(s0.v)) throw ArgumentError("classical_trajectory: non-finite state");
  Trajectory tr;
  tr.times.reserve(n_steps + 1);
  tr.states.reserve(n_steps + 1);
  tr.times.push_back(0.0);
  tr.states.push_back(s0);
  ClassicalState s = s0;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    s = rk4_step(s, force, dt);
    if (!std::isfinite(s.x) || !std::isfinite(s.v)) throw NumericError("classical_trajectory: non-finite state");
    tr.times.push_back(static_cast<double>(k) * dt);
    tr.states.push_back(s);
  }
  return tr;
}

/// Classical flow over a signed time t with ceil(|t| / max_step) equal RK4 steps.
inline ClassicalState classical_flow(ClassicalState s, const ForceField& force, double t, double max_step = 1e-3) {
  if (t == 0.0) return s;
  const auto steps = static_cast<std::size_t>(std::ceil(std::abs(t) / max_step));
  const double h = t / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) s = rk4_step(s, force, h);
  return s;
}

}  // namespace cfgqm

#endif  // CFGQM_CLASSICAL_HPP
