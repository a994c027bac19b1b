#pragma once

// Run configuration: JSON documents merged onto built-in defaults, with
// dotted-path overrides and validation errors that name the offending key.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lro/classical.hpp"
#include "lro/readout.hpp"
#include "lro/schrieffer_wolff.hpp"
#include "lro/spectral.hpp"

namespace lro {

struct SpectrumSettings {
  int rung_cap = 0;  // 0: default cap
  int modular_branches = 15;
  double fold_frequency = -1.0;  // -1: dressed E(0,1) - E(0,0); 0: bare omega_r; else GHz
  NcritOptions ncrit;
};

struct ReadoutSettings {
  ReadoutModel model;
  PulseSpec pulse;
  std::vector<double> alpha_f;
  SseOptions sse;
  int n_traj = 2000;
  std::vector<double> tau_grid;
};

struct ClassicalSettings {
  double omega_d_tilde = 0.0;  // 0: resonator frequency over omega_p
  double section_photons = 49;
  int section_periods = 300;
  int section_trajectories = 16;
  int steps_per_period = 500;
  double charge_calibration = 0.0;  // 0: derived from calibration_chi / calibration_delta
  double calibration_chi = -0.0128;
  double calibration_delta = -2.64;
  std::vector<double> deviation_photons;
  int deviation_samples = 200;
  int deviation_periods = 50;
  int bs_points = 256;
  double crossover = 3.141592653589793;  // mean per-period deviation marking escape
};

struct SwSettings {
  SwOptions options;
  bool compare_exact = true;
};

struct RunConfig {
  nlohmann::json resolved;
  SpectrumSettings spectrum;
  SweepSpec sweep;
  ReadoutSettings readout;
  ClassicalSettings classical;
  SwSettings sw;
  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  int workers = 1;
  bool plot = true;

  /// Transmon block; throws ConfigError when E_J is missing.
  TransmonSpec transmon() const;
  /// Resonator block resolved against the transmon (delta, chi_z targets).
  ResonatorSpec resonator() const;
};

nlohmann::json default_config();

/// Applies "a.b.c=value"; the value is parsed as JSON, falling back to a
/// plain string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Reads a JSON file; ConfigError on I/O or syntax problems.
nlohmann::json read_config_file(const std::filesystem::path& path);

/// Merges `user` onto the defaults and validates every block.
RunConfig parse_config(const nlohmann::json& user);

}  // namespace lro
