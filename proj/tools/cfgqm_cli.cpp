#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "cfgqm/cfgqm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// Numeric trouble and I/O failures happen after a config was accepted;
// everything else means the config (or the command line) was wrong.
int exit_code_for(const cfgqm::Error& e) {
  if (dynamic_cast<const cfgqm::NumericError*>(&e) || dynamic_cast<const cfgqm::IoError*>(&e) ||
      dynamic_cast<const cfgqm::ResourceError*>(&e) || dynamic_cast<const cfgqm::DataError*>(&e))
    return kExitRuntime;
  return kExitConfig;
}

cfgqm::ScenarioConfig resolve(const std::string& target, const std::vector<std::string>& overrides) {
  if (std::filesystem::is_regular_file(target)) return cfgqm::load_config_file(target, overrides);
  if (target.size() > 5 && target.ends_with(".toml")) throw cfgqm::IoError("config file '" + target + "' not found");
  return cfgqm::builtin_scenario(target, overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Configuration-space quantum mechanics: scenario runner"};
  app.require_subcommand(1);

  std::string target, out_dir = ".";
  std::vector<std::string> overrides;
  bool quiet = false, emit = false;

  auto* run = app.add_subcommand("run", "Run a scenario (TOML file or built-in name)");
  run->add_option("config", target, "Config file or built-in scenario name")->required();
  run->add_option("--out-dir", out_dir, "Directory for output files");
  run->add_option("--override", overrides, "Override a config key, e.g. grid.n_x=128")->take_all();
  run->add_flag("--quiet", quiet, "Print nothing on success");

  auto* check = app.add_subcommand("check", "Validate a config and its wrap budgets without evolving");
  check->add_option("config", target, "Config file or built-in scenario name")->required();
  check->add_option("--override", overrides, "Override a config key")->take_all();
  check->add_flag("--quiet", quiet, "Print nothing on success");

  auto* list = app.add_subcommand("list-scenarios", "List the built-in scenarios");
  list->add_flag("--emit", emit, "Write each built-in scenario as <name>.toml into --out-dir");
  list->add_option("--out-dir", out_dir, "Directory for emitted files");
  list->add_flag("--quiet", quiet, "Print nothing but errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*list) {
      for (const auto& name : cfgqm::builtin_scenario_names()) {
        if (emit) {
          std::error_code ec;
          std::filesystem::create_directories(out_dir, ec);
          if (ec) throw cfgqm::IoError("cannot create output directory '" + out_dir + "'");
          const auto path = (std::filesystem::path(out_dir) / (name + ".toml")).string();
          cfgqm::write_file(path, cfgqm::builtin_scenario_toml(name));
          if (!quiet) std::cout << path << '\n';
        } else if (!quiet) {
          const auto c = cfgqm::builtin_scenario(name);
          std::cout << name << "  (" << cfgqm::to_string(c.kind) << ", force " << c.force.kind << ")\n";
        }
      }
      return kExitOk;
    }

    const auto config = resolve(target, overrides);
    if (*check) {
      cfgqm::check_scenario(config);
      if (!quiet) std::cout << config.name << ": ok\n";
      return kExitOk;
    }

    const auto report = cfgqm::run_scenario(config, {out_dir, true});
    if (!quiet) {
      std::cout << report.name << " (" << cfgqm::to_string(report.kind) << "), " << report.series.records.size()
                << " records\n";
      for (const auto& [k, v] : report.metrics) std::printf("  %-34s %.6e\n", k.c_str(), v);
      for (const auto& [k, v] : report.checks) std::printf("  %-34s %s\n", k.c_str(), v ? "yes" : "no");
      for (const auto& f : report.files) std::cout << "  wrote " << (std::filesystem::path(out_dir) / f).string() << '\n';
    }
    return kExitOk;
  } catch (const cfgqm::Error& e) {
    std::cerr << "cfgqm: " << e.kind() << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "cfgqm: internal error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
