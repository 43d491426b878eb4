#ifndef CFGQM_SPECTRAL_HPP
#define CFGQM_SPECTRAL_HPP

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

#include "cfgqm/errors.hpp"
#include "cfgqm/grid.hpp"
#include "cfgqm/wavefunction.hpp"

namespace cfgqm {

enum class Axis { X, V };

namespace detail {

// The FFTW planner is not re-entrant; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(Complex* p) const { fftw_free(p); }
};
using AlignedBuffer = std::unique_ptr<Complex[], FftwFree>;

inline AlignedBuffer aligned_buffer(std::size_t n) {
  auto* p = static_cast<Complex*>(fftw_malloc(sizeof(Complex) * n));
  if (!p) throw ResourceError("fftw_malloc failed");
  std::fill(p, p + n, Complex{});
  return AlignedBuffer(p);
}

inline fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

/// Runs fn(begin, end) over [0, count) split into `workers` contiguous chunks.
/// Chunks never share output, so results do not depend on the worker count.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(workers, count));
  if (w == 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(w - 1);
  const std::size_t chunk = (count + w - 1) / w;
  for (std::size_t t = 1; t < w; ++t) {
    const std::size_t b = std::min(count, t * chunk), e = std::min(count, b + chunk);
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  fn(std::size_t{0}, std::min(count, chunk));
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// In-place forward/backward complex DFT of one length, planned with
/// FFTW_ESTIMATE so the chosen algorithm (and hence every rounding) is the
/// same on every run. Unnormalized in both directions.
class FftPlan {
public:
  explicit FftPlan(std::size_t n) : n_(n) {
    auto buf = detail::aligned_buffer(n);
    std::lock_guard lock(detail::fftw_planner_mutex());
    const int len = static_cast<int>(n);
    fwd_ = fftw_plan_dft_1d(len, detail::as_fftw(buf.get()), detail::as_fftw(buf.get()), FFTW_FORWARD,
                            FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(len, detail::as_fftw(buf.get()), detail::as_fftw(buf.get()), FFTW_BACKWARD,
                            FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw ResourceError("FFTW planning failed");
  }
  ~FftPlan() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return n_; }
  // buf must come from detail::aligned_buffer.
  void forward(Complex* buf) const { fftw_execute_dft(fwd_, detail::as_fftw(buf), detail::as_fftw(buf)); }
  void backward(Complex* buf) const { fftw_execute_dft(bwd_, detail::as_fftw(buf), detail::as_fftw(buf)); }

private:
  std::size_t n_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

/// Angular wavenumbers in transform order: 0, 1, ..., n/2-1, -n/2, ..., -1
/// (times 2 pi / L). The Nyquist bin carries -n/2.
inline std::vector<double> wavenumbers(const Axis1D& a) {
  std::vector<double> k(a.n);
  const double base = 2.0 * std::numbers::pi / a.length();
  const auto n = static_cast<long>(a.n);
  for (long m = 0; m < n; ++m) k[static_cast<std::size_t>(m)] = base * static_cast<double>(m < n / 2 ? m : m - n);
  return k;
}

/// Transform plans and wavenumber tables for one Grid2D. Immutable after
/// construction; line work is spread over `workers` threads with one scratch
/// buffer per thread.
class SpectralWorkspace {
public:
  explicit SpectralWorkspace(const Grid2D& grid, unsigned workers = 1)
      : grid_(grid),
        workers_(std::max(1u, workers)),
        kx_(wavenumbers(grid.x_axis())),
        kv_(wavenumbers(grid.v_axis())),
        plan_x_(grid.n_x),
        plan_v_(grid.n_v) {}

  const Grid2D& grid() const { return grid_; }
  unsigned workers() const { return workers_; }
  std::span<const double> kx() const { return kx_; }
  std::span<const double> kv() const { return kv_; }
  std::span<const double> k(Axis a) const { return a == Axis::X ? kx() : kv(); }
  const FftPlan& plan(Axis a) const { return a == Axis::X ? plan_x_ : plan_v_; }
  std::size_t line_length(Axis a) const { return a == Axis::X ? grid_.n_x : grid_.n_v; }
  std::size_t line_count(Axis a) const { return a == Axis::X ? grid_.n_v : grid_.n_x; }

  /// Gathers every line along `axis` into an aligned buffer, calls
  /// op(line, buffer) and scatters the buffer back. Lines along X are indexed
  /// by the velocity node j, lines along V by the position node i.
  template <class Op>
  void for_each_line(std::span<Complex> data, Axis axis, Op&& op) const {
    if (data.size() != grid_.size()) throw ShapeError("spectral workspace: field size mismatch");
    const std::size_t len = line_length(axis), lines = line_count(axis);
    const std::size_t stride = axis == Axis::X ? grid_.n_v : 1;
    const std::size_t line_step = axis == Axis::X ? 1 : grid_.n_v;
    detail::parallel_for(lines, workers_, [&](std::size_t b, std::size_t e) {
      auto buf = detail::aligned_buffer(len);
      for (std::size_t l = b; l < e; ++l) {
        Complex* base = data.data() + l * line_step;
        for (std::size_t m = 0; m < len; ++m) buf[m] = base[m * stride];
        op(l, std::span<Complex>(buf.get(), len));
        for (std::size_t m = 0; m < len; ++m) base[m * stride] = buf[m];
      }
    });
  }

  /// data <- F^-1[ mult(line, m) * F[data] ] along `axis`, line by line.
  /// The 1/n normalization is applied here; mult must not include it.
  template <class Mult>
  void apply_multiplier(std::span<Complex> data, Axis axis, Mult&& mult) const {
    const FftPlan& p = plan(axis);
    const double inv_n = 1.0 / static_cast<double>(line_length(axis));
    for_each_line(data, axis, [&](std::size_t line, std::span<Complex> buf) {
      p.forward(buf.data());
      for (std::size_t m = 0; m < buf.size(); ++m) buf[m] *= mult(line, m) * inv_n;
      p.backward(buf.data());
    });
  }

  /// As apply_multiplier, with a table laid out [line][mode] that already
  /// includes the 1/n normalization.
  void apply_table(std::span<Complex> data, Axis axis, std::span<const Complex> table) const {
    const FftPlan& p = plan(axis);
    const std::size_t len = line_length(axis);
    for_each_line(data, axis, [&](std::size_t line, std::span<Complex> buf) {
      p.forward(buf.data());
      const Complex* row = table.data() + line * len;
      for (std::size_t m = 0; m < len; ++m) buf[m] *= row[m];
      p.backward(buf.data());
    });
  }

private:
  Grid2D grid_;
  unsigned workers_;
  std::vector<double> kx_, kv_;
  FftPlan plan_x_, plan_v_;
};

/// One-dimensional counterpart used by the basic-QM and photon solvers.
class SpectralWorkspace1D {
public:
  explicit SpectralWorkspace1D(const Grid1D& grid) : grid_(grid), k_(wavenumbers(grid.x_axis())), plan_(grid.n_x) {}

  const Grid1D& grid() const { return grid_; }
  std::span<const double> k() const { return k_; }

  template <class Mult>
  void apply_multiplier(std::span<Complex> data, Mult&& mult) const {
    const std::size_t n = grid_.n_x;
    if (data.size() != n) throw ShapeError("spectral workspace: field size mismatch");
    auto buf = detail::aligned_buffer(n);
    std::copy(data.begin(), data.end(), buf.get());
    plan_.forward(buf.get());
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) buf[m] *= mult(m) * inv_n;
    plan_.backward(buf.get());
    std::copy(buf.get(), buf.get() + n, data.begin());
  }

private:
  Grid1D grid_;
  std::vector<double> k_;
  FftPlan plan_;
};

/// Wavenumber used for odd-order derivatives: the Nyquist bin is dropped so
/// the derivative stays anti-Hermitian on even-sized grids.
inline double odd_derivative_k(std::span<const double> k, std::size_t m) {
  return m == k.size() / 2 ? 0.0 : k[m];
}

}  // namespace cfgqm

#endif  // CFGQM_SPECTRAL_HPP
