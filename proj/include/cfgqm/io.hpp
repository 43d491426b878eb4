#ifndef CFGQM_IO_HPP
#define CFGQM_IO_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cfgqm/errors.hpp"
#include "cfgqm/grid.hpp"
#include "cfgqm/observables.hpp"
#include "cfgqm/wavefunction.hpp"

namespace cfgqm {

inline constexpr const char* kSeriesHeader = "t,mean_x,mean_v,mean_p,mean_a,std_x,std_v,std_p,std_a,energy_class,norm";
inline constexpr std::array<char, 8> kSnapshotMagic{'C', 'F', 'G', 'Q', 'M', '1', '\0', '\0'};

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string series_csv(const ObservableSeries& s) {
  std::string out = kSeriesHeader;
  out += '\n';
  for (const auto& r : s.records) {
    const double cols[] = {r.t,     r.mean_x, r.mean_v, r.mean_p, r.mean_a,       r.std_x,
                           r.std_v, r.std_p,  r.std_a,  r.energy_class, r.norm};
    for (std::size_t k = 0; k < std::size(cols); ++k) {
      if (k) out += ',';
      out += format_double(cols[k]);
    }
    out += '\n';
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_series_csv(const std::string& path, const ObservableSeries& s) { write_file(path, series_csv(s)); }

/// Reads a series CSV back into records; NaN columns come back as NaN.
inline std::vector<ObservableRecord> read_series_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kSeriesHeader) throw DataError("'" + path + "' is not a series CSV");
  std::vector<ObservableRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) v.push_back(std::strtod(cell.c_str(), nullptr));
    if (v.size() != 11) throw DataError("'" + path + "': row with " + std::to_string(v.size()) + " columns");
    ObservableRecord r;
    r.t = v[0];
    r.mean_x = v[1];
    r.mean_v = v[2];
    r.mean_p = v[3];
    r.mean_a = v[4];
    r.std_x = v[5];
    r.std_v = v[6];
    r.std_p = v[7];
    r.std_a = v[8];
    r.energy_class = v[9];
    r.norm = v[10];
    out.push_back(r);
  }
  return out;
}

namespace detail {

inline void put_u64(std::string& out, std::uint64_t x) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((x >> (8 * b)) & 0xffu));
}
inline void put_f64(std::string& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

inline std::uint64_t get_u64(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw DataError("snapshot: truncated file");
  std::uint64_t x = 0;
  for (int b = 0; b < 8; ++b) x |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  pos += 8;
  return x;
}
inline double get_f64(const std::string& in, std::size_t& pos) { return std::bit_cast<double>(get_u64(in, pos)); }

}  // namespace detail

/// Binary field dump: magic, u64 n_x, u64 n_v, f64 x_min, x_max, v_min,
/// v_max, f64 t, then interleaved (re, im) pairs row-major over x then v.
/// Everything little-endian.
inline std::string snapshot_bytes(const WaveFunction2D& wf, double t) {
  const Grid2D& g = wf.grid;
  std::string out(kSnapshotMagic.begin(), kSnapshotMagic.end());
  out.reserve(8 + 7 * 8 + 16 * wf.amps.size());
  detail::put_u64(out, g.n_x);
  detail::put_u64(out, g.n_v);
  for (double b : {g.x_min, g.x_max, g.v_min, g.v_max, t}) detail::put_f64(out, b);
  for (const auto& z : wf.amps) {
    detail::put_f64(out, z.real());
    detail::put_f64(out, z.imag());
  }
  return out;
}

inline void write_snapshot(const std::string& path, const WaveFunction2D& wf, double t) {
  write_file(path, snapshot_bytes(wf, t));
}

inline Snapshot read_snapshot(const std::string& path) {
  const std::string in = read_file(path);
  if (in.size() < 8 || std::memcmp(in.data(), kSnapshotMagic.data(), 8) != 0)
    throw DataError("'" + path + "' is not a snapshot file");
  std::size_t pos = 8;
  Grid2D g;
  g.n_x = detail::get_u64(in, pos);
  g.n_v = detail::get_u64(in, pos);
  g.x_min = detail::get_f64(in, pos);
  g.x_max = detail::get_f64(in, pos);
  g.v_min = detail::get_f64(in, pos);
  g.v_max = detail::get_f64(in, pos);
  const double t = detail::get_f64(in, pos);
  if (in.size() != pos + 16 * g.n_x * g.n_v) throw DataError("'" + path + "': payload size does not match header");
  WaveFunction2D wf(g);
  for (auto& z : wf.amps) {
    const double re = detail::get_f64(in, pos);
    z = {re, detail::get_f64(in, pos)};
  }
  return {t, std::move(wf)};
}

inline std::string spectrum_csv(const std::vector<double>& eig) {
  std::string out = "index,eigenvalue\n";
  for (std::size_t k = 0; k < eig.size(); ++k) out += std::to_string(k) + "," + format_double(eig[k]) + "\n";
  return out;
}

inline void write_spectrum_csv(const std::string& path, const std::vector<double>& eig) {
  write_file(path, spectrum_csv(eig));
}

}  // namespace cfgqm

#endif  // CFGQM_IO_HPP
