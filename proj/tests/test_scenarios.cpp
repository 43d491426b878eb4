#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "support.hpp"

using namespace cfgqm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  const auto p = fs::temp_directory_path() / ("cfgqm_" + tag + "_" + std::to_string(rng() % 1000000000));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(CFGQM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Small versions of the built-ins keep the unit suite fast.
const std::vector<std::string> kSmallFreeFall{"grid.n_x=160", "grid.n_v=192"};
const std::vector<std::string> kSmallHarmonic{"grid.n_x=128", "grid.n_v=128"};

}  // namespace

TEST(Config, BuiltinsRoundTrip) {
  for (const auto& name : builtin_scenario_names()) {
    const auto c = builtin_scenario(name);
    EXPECT_EQ(c.name, name);
    const auto again = parse_config(serialize_config(c));
    EXPECT_EQ(again, c) << name;
    EXPECT_EQ(serialize_config(again), serialize_config(c)) << name;
  }
}

TEST(Config, BuiltinsPassPrechecks) {
  for (const auto& name : builtin_scenario_names()) EXPECT_NO_THROW(check_scenario(builtin_scenario(name))) << name;
}

TEST(Config, Overrides) {
  const auto c = builtin_scenario("harmonic", {"grid.n_x=128", "initial.0.x0=1.5", "force.omega=2", "hbar=0.5"});
  EXPECT_EQ(c.grid.n_x, 128u);
  EXPECT_EQ(c.initial[0].params.x0, 1.5);
  EXPECT_EQ(c.force.omega, 2.0);
  EXPECT_EQ(c.hbar, 0.5);
  EXPECT_THROW(builtin_scenario("harmonic", {"grid.bogus=1"}), ConfigError);
  EXPECT_THROW(builtin_scenario("harmonic", {"no_equals_sign"}), ConfigError);
}

TEST(Config, OddGridNamesTheField) {
  try {
    builtin_scenario("free", {"grid.n_x=7"});
    FAIL() << "expected a configuration error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("n_x"), std::string::npos) << e.what();
  }
}

TEST(Config, Rejections) {
  const std::string base = builtin_scenario_toml("free");
  EXPECT_THROW(parse_config(base, {"kind=\"quantum-gravity\""}), UnknownScenarioError);
  EXPECT_THROW(builtin_scenario("no-such-scenario"), UnknownScenarioError);
  EXPECT_THROW(parse_config(base + "\nextra_key = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("name = \"x\"\n[grid\n"), ConfigError);
  EXPECT_THROW(parse_config(base, {"evolve.duration=1.0"}), ConfigError);
  EXPECT_THROW(builtin_scenario("mixture", {"initial.0.weight=0.6"}), ConfigError);
  EXPECT_THROW(builtin_scenario("free", {"comparisons=[\"photon\"]"}), ConfigError);
  EXPECT_THROW(builtin_scenario("free", {"evolve.record_every=7"}), ConfigError);
  EXPECT_THROW(builtin_scenario("free", {"outputs.series=\"../escape.csv\""}), ConfigError);
  EXPECT_THROW(builtin_scenario("free", {"force.kind=\"magnetic\""}), ConfigError);
}

TEST(Config, LoadFile) {
  const auto dir = fresh_dir("load");
  const auto path = (dir / "h.toml").string();
  write_file(path, builtin_scenario_toml("harmonic"));
  EXPECT_EQ(load_config_file(path), builtin_scenario("harmonic"));
  EXPECT_THROW(load_config_file((dir / "missing.toml").string()), IoError);
  fs::remove_all(dir);
}

TEST(Io, SeriesCsvFormat) {
  ObservableSeries s;
  ObservableRecord r;
  r.t = 0.1;
  r.mean_x = 1.0 / 3.0;
  r.norm = 1.0;
  s.records.push_back(r);
  const auto text = series_csv(s);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,mean_x,mean_v,mean_p,mean_a,std_x,std_v,std_p,std_a,energy_class,norm");
  EXPECT_NE(text.find("0.10000000000000001,0.33333333333333331,nan"), std::string::npos) << text;
}

TEST(Io, SeriesCsvRoundTripIsExact) {
  const auto g = test::square_grid(8.0, 64);
  EvolveSpec spec;
  spec.dt = 1e-2;
  spec.n_steps = 20;
  spec.record_every = 5;
  const auto run = evolve_config_space(gaussian_packet(g, {1, 0, 0.75, 0.75, 0.2, 0}), ForceField::harmonic(1.0), spec);
  const auto dir = fresh_dir("csv");
  const auto path = (dir / "s.csv").string();
  write_series_csv(path, run.series);
  const auto back = read_series_csv(path);
  ASSERT_EQ(back.size(), run.series.records.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].t, run.series.records[k].t);
    EXPECT_EQ(back[k].mean_x, run.series.records[k].mean_x);
    EXPECT_EQ(back[k].std_a, run.series.records[k].std_a);
    EXPECT_EQ(back[k].energy_class, run.series.records[k].energy_class);
  }
  write_file(path, "not,a,series\n");
  EXPECT_THROW(read_series_csv(path), DataError);
  fs::remove_all(dir);
}

TEST(Io, SnapshotRoundTrip) {
  const auto g = make_grid(-3, 5, 16, -2, 2, 8);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  WaveFunction2D wf(g);
  for (auto& z : wf.amps) z = {nd(rng), nd(rng)};
  const auto bytes = snapshot_bytes(wf, 0.125);
  EXPECT_EQ(bytes.size(), 8u + 7 * 8 + 16 * g.size());
  EXPECT_EQ(bytes.substr(0, 8), std::string("CFGQM1\0\0", 8));
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 16u);  // n_x, little-endian
  const auto dir = fresh_dir("snap");
  const auto path = (dir / "w.bin").string();
  write_snapshot(path, wf, 0.125);
  const auto s = read_snapshot(path);
  EXPECT_EQ(s.t, 0.125);
  EXPECT_EQ(s.wf.grid, g);
  EXPECT_EQ(s.wf.amps, wf.amps);
  write_file(path, bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_snapshot(path), DataError);
  write_file(path, "XXXXXXXX" + bytes.substr(8));
  EXPECT_THROW(read_snapshot(path), DataError);
  fs::remove_all(dir);
}

TEST(RunScenario, FreeFallFinalRow) {
  const auto dir = fresh_dir("ff");
  const auto rep = run_scenario(builtin_scenario("free-fall", kSmallFreeFall), {dir, true});
  const auto rows = read_series_csv((dir / "free-fall.csv").string());
  EXPECT_NEAR(rows.back().t, 1.0, 1e-12);
  EXPECT_NEAR(rows.back().mean_v, 9.81, 1e-8);
  EXPECT_NEAR(rows.back().mean_p, 0.0, 1e-8);
  EXPECT_TRUE(fs::exists(dir / "free-fall_report.json"));
  const auto j = nlohmann::json::parse(read_file((dir / "free-fall_report.json").string()));
  EXPECT_EQ(j["name"], "free-fall");
  EXPECT_LE(j["metrics"]["classical_max_deviation"].get<double>(), 1e-5);
  EXPECT_LE(rep.metric("ehrenfest_max"), 1e-6);
  fs::remove_all(dir);
}

TEST(RunScenario, HarmonicTracksClassical) {
  const auto rep = run_scenario(builtin_scenario("harmonic", kSmallHarmonic), {".", false});
  EXPECT_LE(rep.metric("classical_max_deviation"), 1e-5);
  EXPECT_LE(rep.metric("energy_drift_relative"), 1e-8);
  EXPECT_NEAR(rep.metric("final_mean_x"), 1.0, 1e-5);
  EXPECT_THROW(rep.metric("no_such_metric"), ArgumentError);
}

TEST(RunScenario, SnapshotsAndSpectrum) {
  const auto dir = fresh_dir("snaps");
  const auto c = builtin_scenario("harmonic", {"grid.n_x=32", "grid.n_v=32", "initial.0.sigma_x=0.75",
                                               "initial.0.sigma_v=0.75", "evolve.n_steps=400",
                                               "evolve.record_every=4", "outputs.snapshot_every=200",
                                               "outputs.spectrum=true", "outputs.series=\"h.csv\"",
                                               "min_width_cells=1.5"});
  const auto rep = run_scenario(c, {dir, true});
  for (const char* f : {"h.csv", "harmonic_snap_00000000.bin", "harmonic_snap_00000200.bin",
                        "harmonic_snap_00000400.bin", "harmonic_spectrum.csv", "harmonic_report.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_EQ(rep.spectrum.size(), 1024u);
  EXPECT_GE(rep.metric("heng_min_eigenvalue"), -1e-10);
  EXPECT_LE(rep.metric("heng_commutator_max"), 1e-9);
  const auto snap = read_snapshot((dir / "harmonic_snap_00000200.bin").string());
  EXPECT_NEAR(snap.t, 200 * c.evolve_spec().dt, 1e-15);
  fs::remove_all(dir);
}

TEST(RunScenario, Deterministic) {
  const auto cfg = builtin_scenario("mixture", {"grid.n_x=128", "grid.n_v=128", "evolve.n_steps=200",
                                                "outputs.snapshot_every=100"});
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b"), c = fresh_dir("det_c");
  run_scenario(cfg, {a, true});
  run_scenario(cfg, {b, true});
  auto four = cfg;
  four.evolve.workers = 4;
  run_scenario(four, {c, true});
  for (const char* f : {"mixture.csv", "mixture_snap_00000100.bin", "mixture_report.json"}) {
    const auto ra = read_file((a / f).string());
    EXPECT_EQ(ra, read_file((b / f).string())) << f;
    EXPECT_EQ(ra, read_file((c / f).string())) << f;
  }
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST(RunScenario, UnwritableOutput) {
  const auto dir = fresh_dir("ro");
  write_file((dir / "file").string(), "x");
  EXPECT_THROW(run_scenario(builtin_scenario("photon", {"evolve.n_steps=100"}), {dir / "file" / "sub", true}), IoError);
  fs::remove_all(dir);
}

TEST(RunScenario, PhotonShift) {
  const auto rep = run_scenario(builtin_scenario("photon"), {".", false});
  EXPECT_LE(rep.metric("photon_shift_l2_distance"), 1e-12);
  EXPECT_LE(rep.metric("norm_drift"), 1e-12);
}

TEST(Emergence, FreeMomentumMap) {
  const auto e = run_emergence_comparison(builtin_scenario("emergence-free", {"grid.n_x=128", "grid.n_v=128"}));
  EXPECT_NEAR(e.bqm.records.back().mean_p, 2.0, 1e-8);
  EXPECT_LE(e.p_map_residual, 1e-8);
  EXPECT_LE(e.x_max_diff, 1e-5);
}

TEST(Emergence, FreeFallDivergenceIsReported) {
  const auto e = run_emergence_comparison(builtin_scenario("emergence-free-fall", kSmallFreeFall));
  EXPECT_LE(e.p_cfg_drift, 1e-8);
  EXPECT_LE(e.p_bqm_growth_residual, 1e-6);
  EXPECT_NEAR(e.momentum_divergence, 9.81, 1e-6);
  EXPECT_LE(e.x_max_diff, 1e-5);
}

TEST(Emergence, Errors) {
  auto c = builtin_scenario("emergence", {"grid.n_x=64", "grid.n_v=64", "initial.0.sigma_x=0.75",
                                          "initial.0.sigma_v=0.75"});
  c.force.kind = "polynomial";
  c.force.coefficients = {0.0, -1.0};
  EXPECT_THROW(run_emergence_comparison(c), ArgumentError);
}

TEST(Dispersion, LawsAndIdentityAtZero) {
  const auto d = run_dispersion_comparison(builtin_scenario("dispersion", {"grid.n_x=128", "evolve.n_steps=400"}));
  EXPECT_EQ(d.dx_cfg.front(), d.dx_cfg_law.front());
  EXPECT_EQ(d.dx_bqm.front(), d.dx_bqm_law.front());
  EXPECT_TRUE(d.laws_hold);
  EXPECT_LE(d.max_cfg_deviation, 1e-4);
  EXPECT_LE(d.max_bqm_deviation, 1e-4);
}

TEST(Dispersion, BasicQmSpreadAtUnitTime) {
  const auto d = run_dispersion_comparison(builtin_scenario("dispersion", {"grid.n_x=128"}));
  EXPECT_NEAR(d.dx_bqm.back(), std::sqrt(0.25 + 1.0), 1e-4);
}

TEST(Dispersion, NeedsFreeForce) {
  auto c = builtin_scenario("dispersion");
  c.force.kind = "harmonic";
  c.force.omega = 1.0;
  EXPECT_THROW(run_dispersion_comparison(c), ArgumentError);
}

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("cli");
  const auto out = dir.string();
  EXPECT_EQ(cli("check free --quiet"), 0);
  EXPECT_EQ(cli("check free --override grid.n_x=7"), 2);
  EXPECT_EQ(cli("check no-such-scenario"), 2);
  EXPECT_EQ(cli("check free --override initial.0.v0=7.5"), 2);  // wrap budget
  EXPECT_EQ(cli("frobnicate"), 2);
  EXPECT_EQ(cli("check " + out + "/missing.toml"), 3);
  EXPECT_EQ(cli("run photon --quiet --override evolve.n_steps=100 --out-dir " + out), 0);
  EXPECT_TRUE(fs::exists(dir / "photon.csv"));
  write_file((dir / "blocker").string(), "x");
  EXPECT_EQ(cli("run photon --quiet --override evolve.n_steps=100 --out-dir " + out + "/blocker/sub"), 3);
  fs::remove_all(dir);
}

TEST(Cli, EmitBuiltins) {
  const auto dir = fresh_dir("emit");
  ASSERT_EQ(cli("list-scenarios --emit --out-dir " + dir.string()), 0);
  for (const auto& name : builtin_scenario_names()) {
    const auto path = dir / (name + ".toml");
    ASSERT_TRUE(fs::exists(path)) << name;
    EXPECT_EQ(load_config_file(path.string()), builtin_scenario(name));
  }
  // an emitted file runs like the built-in it came from
  EXPECT_EQ(cli("check " + (dir / "harmonic.toml").string() + " --quiet"), 0);
  fs::remove_all(dir);
}
