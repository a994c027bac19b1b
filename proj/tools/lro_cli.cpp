// lro: command-line driver.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lro/commands.hpp"
#include "lro/config.hpp"
#include "lro/errors.hpp"
#include "lro/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Transmon readout toolkit: spectra, critical photon numbers, readout and classical models"};
  app.set_version_flag("--version", lro::version_string());
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<long long> seed;
  std::optional<int> workers;
  std::string plot;
  std::vector<std::string> overrides;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"spectrum", "branch analysis, populations and modular spectrum"},
      {"ncrit-map", "critical photon numbers over a parameter grid"},
      {"readout", "assignment error from heterodyne trajectories"},
      {"classical", "Poincare sections, Bohr-Sommerfeld orbits and trajectory deviation"},
      {"sw-report", "exact diagonal model and second-order Schrieffer-Wolff energies"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--workers", workers, "worker threads (overrides LRO_WORKERS and the config)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--plot", plot, "emit SVG plots")->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--set", overrides, "override a config key, e.g. --set resonator.omega_r=10.5");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    nlohmann::json doc = config_path.empty() ? nlohmann::json::object() : lro::read_config_file(config_path);
    for (const auto& o : overrides) lro::apply_override(doc, o);
    if (!out_dir.empty()) doc["out"] = out_dir;
    if (seed) {
      if (*seed < 0) throw lro::ConfigError("seed", "must be non-negative");
      doc["seed"] = *seed;
    }
    if (!plot.empty()) doc["plot"] = (plot == "on");
    if (const char* env = std::getenv("LRO_WORKERS")) {
      try {
        const int v = std::stoi(env);
        if (v < 1) throw std::invalid_argument("non-positive");
        doc["workers"] = v;
      } catch (const std::exception&) {
        throw lro::ConfigError("LRO_WORKERS", fmt::format("expected a positive integer (got '{}')", env));
      }
    }
    if (workers) doc["workers"] = *workers;

    const lro::RunConfig cfg = lro::parse_config(doc);
    const lro::CommandResult res = lro::run_command(name, cfg);
    for (const auto& f : res.outputs) fmt::print("{}\n", (cfg.out / f).string());
    if (res.exit_code != 0) fmt::print(stderr, "lro {}: finished with warnings, see {}\n", name,
                                       (cfg.out / "run.json").string());
    return res.exit_code;
  } catch (const lro::ConfigError& e) {
    fmt::print(stderr, "lro {}: config error: {}\n", name, e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "lro {}: {}\n", name, e.what());
    return 1;
  }
}
