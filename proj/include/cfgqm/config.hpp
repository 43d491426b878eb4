#ifndef CFGQM_CONFIG_HPP
#define CFGQM_CONFIG_HPP

#include <toml.hpp>

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cfgqm/errors.hpp"
#include "cfgqm/force.hpp"
#include "cfgqm/grid.hpp"
#include "cfgqm/propagators.hpp"
#include "cfgqm/spectra.hpp"
#include "cfgqm/wavefunction.hpp"

namespace cfgqm {

enum class ScenarioKind { Configuration, Photon, Emergence, Dispersion };

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Configuration: return "configuration";
    case ScenarioKind::Photon: return "photon";
    case ScenarioKind::Emergence: return "emergence";
    case ScenarioKind::Dispersion: return "dispersion";
  }
  return "?";
}

inline ScenarioKind parse_scenario_kind(std::string_view s) {
  for (auto k : {ScenarioKind::Configuration, ScenarioKind::Photon, ScenarioKind::Emergence, ScenarioKind::Dispersion})
    if (s == to_string(k)) return k;
  throw UnknownScenarioError("unknown scenario kind '" + std::string(s) + "'");
}

struct ForceConfig {
  std::string kind = "free";  // free | uniform | harmonic | polynomial
  double mass = 1.0;
  double g = 9.81;
  double omega = 1.0;
  std::vector<double> coefficients;
  bool operator==(const ForceConfig&) const = default;

  ForceField build() const {
    if (kind == "free") return ForceField::free(mass);
    if (kind == "uniform") return ForceField::uniform(g, mass);
    if (kind == "harmonic") return ForceField::harmonic(omega, mass);
    if (kind == "polynomial") return ForceField::polynomial(coefficients, mass);
    throw ConfigError("force.kind: unknown force '" + kind + "'");
  }
};

struct PacketConfig {
  PacketParams params;
  double weight = 1.0;
  bool operator==(const PacketConfig&) const = default;
};

struct EvolveConfig {
  double dt = 1e-3;
  std::size_t n_steps = 1000;
  std::optional<double> duration;  // when set, dt = duration / n_steps
  std::string method = "strang";   // strang | characteristics
  std::size_t record_every = 1;
  unsigned workers = 1;
  std::string split = "xvx";       // xvx | vxv
  bool operator==(const EvolveConfig&) const = default;
};

struct OutputConfig {
  std::string series;  // empty: <name>.csv
  std::size_t snapshot_every = 0;
  bool spectrum = false;
  bool operator==(const OutputConfig&) const = default;
};

struct PhotonConfig {
  int direction = 1;
  double c = 1.0;
  bool operator==(const PhotonConfig&) const = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  ScenarioKind kind = ScenarioKind::Configuration;
  double hbar = 1.0;
  double min_width_cells = kDefaultMinWidthCells;
  Grid2D grid{-8.0, 8.0, 256, -8.0, 8.0, 256};
  ForceConfig force;
  std::vector<PacketConfig> initial;
  EvolveConfig evolve;
  std::vector<std::string> comparisons;  // subset of classical, characteristics, basic_qm, photon
  OutputConfig outputs;
  PhotonConfig photon;
  bool operator==(const ScenarioConfig&) const = default;

  PhysicalConstants constants() const { return {hbar}; }
  Grid1D grid_1d() const { return {grid.x_min, grid.x_max, grid.n_x}; }
  bool compares(std::string_view c) const {
    for (const auto& s : comparisons)
      if (s == c) return true;
    return false;
  }

  EvolveSpec evolve_spec() const {
    EvolveSpec s;
    s.n_steps = evolve.n_steps;
    s.dt = evolve.duration ? *evolve.duration / static_cast<double>(evolve.n_steps) : evolve.dt;
    s.method = evolve.method == "characteristics" ? Method::Characteristics : Method::StrangSplit;
    s.order = evolve.split == "vxv" ? SplitOrder::VXV : SplitOrder::XVX;
    s.record_every = evolve.record_every;
    s.workers = evolve.workers;
    s.snapshot_every = outputs.snapshot_every;
    return s;
  }

  std::vector<double> weights() const {
    std::vector<double> w;
    for (const auto& p : initial) w.push_back(p.weight);
    return w;
  }
  std::vector<PacketParams> packets() const {
    std::vector<PacketParams> p;
    for (const auto& q : initial) p.push_back(q.params);
    return p;
  }

  void validate() const {
    if (name.empty()) throw ConfigError("name must not be empty");
    for (char ch : name)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_'))
        throw ConfigError("name may only contain letters, digits, '-' and '_'");
    constants().validate();
    grid.validate();
    if (!(min_width_cells > 0.0)) throw ConfigError("min_width_cells must be positive");
    (void)force.build();
    if (!(force.mass > 0.0)) throw ConfigError("force.mass must be positive");
    if (initial.empty()) throw ConfigError("initial: at least one packet is required");
    double total = 0.0;
    for (const auto& p : initial) {
      if (!(p.weight >= 0.0)) throw ConfigError("initial.weight must be non-negative");
      total += p.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("initial: weights must sum to 1");
    if (evolve.method != "strang" && evolve.method != "characteristics")
      throw ConfigError("evolve.method must be 'strang' or 'characteristics'");
    if (evolve.split != "xvx" && evolve.split != "vxv") throw ConfigError("evolve.split must be 'xvx' or 'vxv'");
    if (evolve.duration && !(*evolve.duration > 0.0)) throw ConfigError("evolve.duration must be positive");
    evolve_spec().validate();

    std::set<std::string> allowed;
    switch (kind) {
      case ScenarioKind::Configuration: allowed = {"classical", "characteristics", "basic_qm"}; break;
      case ScenarioKind::Photon: allowed = {"photon"}; break;
      case ScenarioKind::Emergence: allowed = {"classical", "basic_qm"}; break;
      case ScenarioKind::Dispersion: allowed = {"basic_qm"}; break;
    }
    for (const auto& c : comparisons)
      if (!allowed.count(c))
        throw ConfigError("comparisons: '" + c + "' is not available for " + to_string(kind) + " scenarios");

    if (kind != ScenarioKind::Configuration && initial.size() != 1)
      throw ConfigError(std::string(to_string(kind)) + " scenarios take exactly one initial packet");
    if (kind == ScenarioKind::Configuration && compares("basic_qm") && initial.size() != 1)
      throw ConfigError("comparisons: basic_qm needs a single initial packet");
    if (kind == ScenarioKind::Photon) {
      if (photon.direction != 1 && photon.direction != -1) throw ConfigError("photon.direction must be 1 or -1");
      if (!(photon.c > 0.0)) throw ConfigError("photon.c must be positive");
    }
    if (outputs.spectrum) {
      if (kind != ScenarioKind::Configuration) throw ConfigError("outputs.spectrum is only available for configuration scenarios");
      if (grid.size() > kMaxDenseDim) throw ConfigError("outputs.spectrum needs n_x * n_v <= 4096");
    }
    if (outputs.series.find('/') != std::string::npos) throw ConfigError("outputs.series must be a plain file name");
  }
};

// ---------------------------------------------------------------------------
// TOML

namespace detail {

// Reads keys out of one table and remembers which were used, so anything
// left over can be reported as unknown.
class TableReader {
public:
  TableReader(const toml::table& t, std::string prefix) : t_(t), prefix_(std::move(prefix)) {}

  std::string path(std::string_view key) const { return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key); }

  const toml::node* node(std::string_view key) {
    used_.insert(std::string(key));
    return t_.get(key);
  }

  template <class T>
  void read(std::string_view key, T& out, bool required = false) {
    const toml::node* n = node(key);
    if (!n) {
      if (required) throw ConfigError(path(key) + " is required");
      return;
    }
    out = convert<T>(*n, path(key));
  }

  template <class T>
  void read_optional(std::string_view key, std::optional<T>& out) {
    if (const toml::node* n = node(key)) out = convert<T>(*n, path(key));
  }

  template <class T>
  static T convert(const toml::node& n, const std::string& where) {
    if constexpr (std::is_same_v<T, double>) {
      if (auto v = n.value_exact<double>()) return *v;
      if (auto v = n.value_exact<int64_t>()) return static_cast<double>(*v);
      throw ConfigError(where + " must be a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (auto v = n.value_exact<bool>()) return *v;
      throw ConfigError(where + " must be true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (auto v = n.value_exact<std::string>()) return *v;
      throw ConfigError(where + " must be a string");
    } else if constexpr (std::is_integral_v<T>) {
      auto v = n.value_exact<int64_t>();
      if (!v) throw ConfigError(where + " must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (*v < 0) throw ConfigError(where + " must not be negative");
      }
      return static_cast<T>(*v);
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      const auto* arr = n.as_array();
      if (!arr) throw ConfigError(where + " must be an array of numbers");
      std::vector<double> out;
      for (std::size_t k = 0; k < arr->size(); ++k) out.push_back(convert<double>(*arr->get(k), where));
      return out;
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      const auto* arr = n.as_array();
      if (!arr) throw ConfigError(where + " must be an array of strings");
      std::vector<std::string> out;
      for (std::size_t k = 0; k < arr->size(); ++k) out.push_back(convert<std::string>(*arr->get(k), where));
      return out;
    } else {
      static_assert(sizeof(T) == 0, "unsupported config type");
    }
  }

  const toml::table* subtable(std::string_view key, bool required) {
    const toml::node* n = node(key);
    if (!n) {
      if (required) throw ConfigError("[" + path(key) + "] table is required");
      return nullptr;
    }
    const auto* t = n->as_table();
    if (!t) throw ConfigError(path(key) + " must be a table");
    return t;
  }

  void finish() const {
    for (auto&& [k, v] : t_)
      if (!used_.count(std::string(k.str()))) throw ConfigError("unknown key '" + path(k.str()) + "'");
  }

private:
  const toml::table& t_;
  std::string prefix_;
  std::set<std::string> used_;
};

}  // namespace detail

inline ScenarioConfig config_from_table(const toml::table& root) {
  ScenarioConfig c;
  detail::TableReader top(root, "");
  top.read("name", c.name, true);
  std::string kind = "configuration";
  top.read("kind", kind);
  c.kind = parse_scenario_kind(kind);
  top.read("hbar", c.hbar);
  top.read("min_width_cells", c.min_width_cells);
  top.read("comparisons", c.comparisons);

  {
    detail::TableReader r(*top.subtable("grid", true), "grid");
    r.read("x_min", c.grid.x_min, true);
    r.read("x_max", c.grid.x_max, true);
    r.read("n_x", c.grid.n_x, true);
    r.read("v_min", c.grid.v_min, true);
    r.read("v_max", c.grid.v_max, true);
    r.read("n_v", c.grid.n_v, true);
    r.finish();
  }
  if (const auto* t = top.subtable("force", false)) {
    detail::TableReader r(*t, "force");
    r.read("kind", c.force.kind);
    r.read("mass", c.force.mass);
    r.read("g", c.force.g);
    r.read("omega", c.force.omega);
    r.read("coefficients", c.force.coefficients);
    r.finish();
  }
  {
    const toml::node* n = top.node("initial");
    if (!n) throw ConfigError("[[initial]] is required");
    const auto* arr = n->as_array();
    if (!arr || !arr->is_array_of_tables()) throw ConfigError("initial must be an array of tables ([[initial]])");
    for (std::size_t k = 0; k < arr->size(); ++k) {
      detail::TableReader r(*arr->get(k)->as_table(), "initial." + std::to_string(k));
      PacketConfig p;
      r.read("x0", p.params.x0, true);
      r.read("v0", p.params.v0, true);
      r.read("sigma_x", p.params.sigma_x, true);
      r.read("sigma_v", p.params.sigma_v, true);
      r.read("p0", p.params.p0);
      r.read("a0", p.params.a0);
      r.read("weight", p.weight);
      r.finish();
      c.initial.push_back(p);
    }
  }
  {
    detail::TableReader r(*top.subtable("evolve", true), "evolve");
    r.read("n_steps", c.evolve.n_steps, true);
    r.read_optional("duration", c.evolve.duration);
    if (c.evolve.duration) {
      if (r.node("dt")) throw ConfigError("evolve.dt and evolve.duration are mutually exclusive");
    } else {
      r.read("dt", c.evolve.dt, true);
    }
    r.read("method", c.evolve.method);
    r.read("record_every", c.evolve.record_every);
    r.read("workers", c.evolve.workers);
    r.read("split", c.evolve.split);
    r.finish();
  }
  if (const auto* t = top.subtable("outputs", false)) {
    detail::TableReader r(*t, "outputs");
    r.read("series", c.outputs.series);
    r.read("snapshot_every", c.outputs.snapshot_every);
    r.read("spectrum", c.outputs.spectrum);
    r.finish();
  }
  if (const auto* t = top.subtable("photon", false)) {
    detail::TableReader r(*t, "photon");
    r.read("direction", c.photon.direction);
    r.read("c", c.photon.c);
    r.finish();
  }
  top.finish();
  c.validate();
  return c;
}

inline toml::table config_to_table(const ScenarioConfig& c) {
  auto num_array = [](const std::vector<double>& v) {
    toml::array a;
    for (double x : v) a.push_back(x);
    return a;
  };
  toml::table root;
  root.insert("name", c.name);
  root.insert("kind", to_string(c.kind));
  root.insert("hbar", c.hbar);
  root.insert("min_width_cells", c.min_width_cells);
  toml::array comps;
  for (const auto& s : c.comparisons) comps.push_back(s);
  root.insert("comparisons", comps);
  root.insert("grid", toml::table{{"x_min", c.grid.x_min},
                                  {"x_max", c.grid.x_max},
                                  {"n_x", static_cast<int64_t>(c.grid.n_x)},
                                  {"v_min", c.grid.v_min},
                                  {"v_max", c.grid.v_max},
                                  {"n_v", static_cast<int64_t>(c.grid.n_v)}});
  root.insert("force", toml::table{{"kind", c.force.kind},
                                   {"mass", c.force.mass},
                                   {"g", c.force.g},
                                   {"omega", c.force.omega},
                                   {"coefficients", num_array(c.force.coefficients)}});
  toml::array init;
  for (const auto& p : c.initial)
    init.push_back(toml::table{{"x0", p.params.x0},
                               {"v0", p.params.v0},
                               {"sigma_x", p.params.sigma_x},
                               {"sigma_v", p.params.sigma_v},
                               {"p0", p.params.p0},
                               {"a0", p.params.a0},
                               {"weight", p.weight}});
  root.insert("initial", init);
  toml::table ev{{"n_steps", static_cast<int64_t>(c.evolve.n_steps)},
                 {"method", c.evolve.method},
                 {"record_every", static_cast<int64_t>(c.evolve.record_every)},
                 {"workers", static_cast<int64_t>(c.evolve.workers)},
                 {"split", c.evolve.split}};
  if (c.evolve.duration)
    ev.insert("duration", *c.evolve.duration);
  else
    ev.insert("dt", c.evolve.dt);
  root.insert("evolve", ev);
  root.insert("outputs", toml::table{{"series", c.outputs.series},
                                     {"snapshot_every", static_cast<int64_t>(c.outputs.snapshot_every)},
                                     {"spectrum", c.outputs.spectrum}});
  root.insert("photon", toml::table{{"direction", static_cast<int64_t>(c.photon.direction)}, {"c", c.photon.c}});
  return root;
}

inline std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream os;
  os << config_to_table(c) << '\n';
  return os.str();
}

inline toml::table parse_toml(std::string_view text, std::string_view source = "config") {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error in " << source << " at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
}

/// Applies "a.b.c=value" to a parsed table. The value is read as a TOML value
/// when it parses as one and as a bare string otherwise. Numeric path
/// components index arrays of tables (initial.0.x0).
inline void apply_override(toml::table& root, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));

  toml::table parsed;
  try {
    parsed = toml::parse("v = " + text);
  } catch (const toml::parse_error&) {
    parsed = toml::table{{"v", text}};
  }

  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string p; std::getline(ss, p, '.');) {
    if (p.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    parts.push_back(p);
  }
  toml::node* cur = &root;
  for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
    const std::string& p = parts[k];
    if (auto* t = cur->as_table()) {
      if (!t->contains(p)) t->insert(p, toml::table{});
      cur = t->get(p);
    } else if (auto* a = cur->as_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(p);
      } catch (const std::exception&) {
        throw ConfigError("override key '" + key + "': '" + p + "' is not an array index");
      }
      if (idx >= a->size()) throw ConfigError("override key '" + key + "': index " + p + " out of range");
      cur = a->get(idx);
    } else {
      throw ConfigError("override key '" + key + "' descends into a value");
    }
  }
  auto* t = cur->as_table();
  if (!t) throw ConfigError("override key '" + key + "' does not name a table entry");
  t->insert_or_assign(parts.back(), *parsed.get("v"));
}

inline ScenarioConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {},
                                   std::string_view source = "config") {
  toml::table root = parse_toml(text, source);
  for (const auto& o : overrides) apply_override(root, o);
  return config_from_table(root);
}

inline ScenarioConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides, path);
}

}  // namespace cfgqm

#endif  // CFGQM_CONFIG_HPP
