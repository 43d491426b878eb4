#ifndef CFGQM_SPECTRA_HPP
#define CFGQM_SPECTRA_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cfgqm/errors.hpp"
#include "cfgqm/force.hpp"
#include "cfgqm/grid.hpp"
#include "cfgqm/operators.hpp"
#include "cfgqm/spectral.hpp"
#include "cfgqm/wavefunction.hpp"

namespace cfgqm {

inline constexpr std::size_t kMaxDenseDim = 4096;

/// Dense operator on the n_x * n_v node basis, flat index i * n_v + j.
struct DenseOperator {
  Grid2D grid;
  Eigen::MatrixXcd entries;

  std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }

  WaveFunction2D apply(const WaveFunction2D& wf) const {
    if (wf.grid != grid) throw ShapeError("dense operator: grid mismatch");
    Eigen::Map<const Eigen::VectorXcd> in(wf.amps.data(), static_cast<Eigen::Index>(wf.amps.size()));
    WaveFunction2D out(grid);
    Eigen::Map<Eigen::VectorXcd>(out.amps.data(), static_cast<Eigen::Index>(out.amps.size())) = entries * in;
    return out;
  }
};

inline double hermiticity_defect(const Eigen::MatrixXcd& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

inline double commutator_max(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a * b - b * a).cwiseAbs().maxCoeff();
}

/// -i hbar d/dx on an n-node periodic axis as a dense matrix, built from the
/// explicit DFT sum (1/n) sum_m hbar k_m e^{i k_m (x_a - x_b)} with the
/// Nyquist term dropped.
inline Eigen::MatrixXcd spectral_derivative_matrix(const Axis1D& axis, double hbar) {
  const auto k = wavenumbers(axis);
  const auto n = static_cast<Eigen::Index>(axis.n);
  const double h = axis.spacing();
  Eigen::MatrixXcd d(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      Complex s{};
      for (std::size_t m = 0; m < axis.n; ++m) {
        const double km = odd_derivative_k(k, m);
        if (km != 0.0) s += km * std::polar(1.0, km * static_cast<double>(a - b) * h);
      }
      d(a, b) = hbar * s / static_cast<double>(n);
    }
  return d;
}

/// H = diag(v) P_x + diag(f(x)) A_v as a dense matrix.
inline DenseOperator build_hdyn_matrix(const Grid2D& grid, const ForceField& force, const PhysicalConstants& pc = {}) {
  grid.validate();
  if (grid.size() > kMaxDenseDim)
    throw ResourceError("build_hdyn_matrix: dimension " + std::to_string(grid.size()) + " exceeds " +
                        std::to_string(kMaxDenseDim));
  const auto px = spectral_derivative_matrix(grid.x_axis(), pc.hbar);
  const auto av = spectral_derivative_matrix(grid.v_axis(), pc.hbar);
  const auto nx = static_cast<Eigen::Index>(grid.n_x), nv = static_cast<Eigen::Index>(grid.n_v);
  DenseOperator h{grid, Eigen::MatrixXcd::Zero(nx * nv, nx * nv)};
  for (Eigen::Index i = 0; i < nx; ++i)
    for (Eigen::Index j = 0; j < nv; ++j) {
      const Eigen::Index row = i * nv + j;
      const double v = grid.v(static_cast<std::size_t>(j));
      for (Eigen::Index i2 = 0; i2 < nx; ++i2) h.entries(row, i2 * nv + j) += v * px(i, i2);
      if (!force.is_free()) {
        const double f = force.f(grid.x(static_cast<std::size_t>(i)));
        for (Eigen::Index j2 = 0; j2 < nv; ++j2) h.entries(row, i * nv + j2) += f * av(j, j2);
      }
    }
  return h;
}

/// Ascending eigenvalues of a Hermitian operator.
inline std::vector<double> eigenvalues(const DenseOperator& op) {
  if (hermiticity_defect(op.entries) > 1e-8) throw PreconditionError("eigenvalues: operator is not Hermitian");
  const Eigen::MatrixXcd sym = 0.5 * (op.entries + op.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalues: eigensolver did not converge");
  const auto& e = es.eigenvalues();
  return {e.data(), e.data() + e.size()};
}

/// H_eng = U |E| U^dagger from H_dyn = U E U^dagger.
inline DenseOperator energy_observable(const DenseOperator& hdyn) {
  if (hermiticity_defect(hdyn.entries) > 1e-8) throw PreconditionError("energy_observable: H_dyn is not Hermitian");
  const Eigen::MatrixXcd sym = 0.5 * (hdyn.entries + hdyn.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
  if (es.info() != Eigen::Success) throw NumericError("energy_observable: eigensolver did not converge");
  const Eigen::MatrixXcd& u = es.eigenvectors();
  const Eigen::VectorXd mag = es.eigenvalues().cwiseAbs();
  Eigen::MatrixXcd heng = u * mag.asDiagonal() * u.adjoint();
  heng = 0.5 * (heng + heng.adjoint()).eval();
  return {hdyn.grid, std::move(heng)};
}

struct EnergyCommutationReport {
  std::vector<double> residuals;  // ||[H_class, H_dyn] psi|| / ||psi|| per state
  double max_residual = 0.0;
};

/// [H_class, H_dyn] applied to each state through the matrix-free operators,
/// with H_class = m v^2 / 2 + V(x).
inline EnergyCommutationReport energy_commutation_check(const Grid2D& grid, const ForceField& force,
                                                        std::span<const WaveFunction2D> states,
                                                        const PhysicalConstants& pc = {}) {
  SpectralWorkspace ws(grid);
  const double m = force.mass();
  auto hclass = [&](const WaveFunction2D& wf) {
    WaveFunction2D out = wf;
    for (std::size_t i = 0; i < grid.n_x; ++i) {
      const double V = force.potential(grid.x(i));
      for (std::size_t j = 0; j < grid.n_v; ++j) {
        const double v = grid.v(j);
        out.at(i, j) *= 0.5 * m * v * v + V;
      }
    }
    return out;
  };
  EnergyCommutationReport rep;
  for (const auto& wf : states) {
    if (wf.grid != grid) throw ShapeError("energy_commutation_check: state grid mismatch");
    if (!is_interior(wf)) throw PreconditionError("energy_commutation_check: state support touches the boundary");
    const auto a = hclass(apply_hdyn(wf, force, ws, pc));
    const auto b = apply_hdyn(hclass(wf), force, ws, pc);
    double d = 0.0;
    for (std::size_t k = 0; k < a.amps.size(); ++k) d += std::norm(a.amps[k] - b.amps[k]);
    const double r = std::sqrt(d * wf.cell()) / norm(wf);
    rep.residuals.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  return rep;
}

}  // namespace cfgqm

#endif  // CFGQM_SPECTRA_HPP
