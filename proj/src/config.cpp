#include "lro/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "lro/errors.hpp"

namespace lro {

using nlohmann::json;

namespace {

// Keys that may appear although the defaults leave them unset.
const std::set<std::string> kOptionalKeys = {
    "transmon.e_j", "transmon.e_j_over_e_c", "resonator.omega_r", "resonator.delta",
    "resonator.phi_rzpf", "resonator.chi_z", "circuit", "readout.k_levels", "description"};

// Subtrees whose shape is polymorphic (list or range object).
const std::set<std::string> kOpenKeys = {"sweep.axis_1", "sweep.axis_2", "readout.tau_grid", "readout.alpha_f",
                                         "classical.deviation_photons", "sw.levels", "circuit", "description"};

void check_keys(const json& user, const json& defaults, const std::string& prefix) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (kOpenKeys.count(path)) continue;
    const bool known = defaults.contains(it.key());
    if (!known && !kOptionalKeys.count(path)) throw ConfigError(path, "unknown key");
    if (known && defaults[it.key()].is_object()) {
      if (!it.value().is_object()) throw ConfigError(path, "expected an object");
      check_keys(it.value(), defaults[it.key()], path);
    }
  }
}

const json* find(const json& doc, const std::string& path) {
  const json* cur = &doc;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &(*cur)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return cur;
}

double num(const json& doc, const std::string& path) {
  const json* v = find(doc, path);
  if (!v || v->is_null()) throw ConfigError(path, "required");
  if (!v->is_number()) throw ConfigError(path, "expected a number");
  const double d = v->get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
  return d;
}

double positive(const json& doc, const std::string& path) {
  const double v = num(doc, path);
  if (!(v > 0.0)) throw ConfigError(path, fmt::format("must be positive (got {})", v));
  return v;
}

double non_negative(const json& doc, const std::string& path) {
  const double v = num(doc, path);
  if (v < 0.0) throw ConfigError(path, fmt::format("must be non-negative (got {})", v));
  return v;
}

int integer(const json& doc, const std::string& path, int min_value) {
  const json* v = find(doc, path);
  if (!v || v->is_null()) throw ConfigError(path, "required");
  if (!v->is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto i = v->get<long long>();
  if (i < min_value) throw ConfigError(path, fmt::format("must be >= {} (got {})", min_value, i));
  return static_cast<int>(i);
}

bool boolean(const json& doc, const std::string& path) {
  const json* v = find(doc, path);
  if (!v || !v->is_boolean()) throw ConfigError(path, "expected true or false");
  return v->get<bool>();
}

std::string text(const json& doc, const std::string& path) {
  const json* v = find(doc, path);
  if (!v || !v->is_string()) throw ConfigError(path, "expected a string");
  return v->get<std::string>();
}

// A list of numbers, or {"start", "stop", "count"} (inclusive linspace), or
// {"start", "stop", "step"}.
std::vector<double> number_list(const json& doc, const std::string& path) {
  const json* v = find(doc, path);
  if (!v) throw ConfigError(path, "required");
  std::vector<double> out;
  if (v->is_number()) return {v->get<double>()};
  if (v->is_array()) {
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) throw ConfigError(fmt::format("{}[{}]", path, i), "expected a number");
      out.push_back((*v)[i].get<double>());
    }
  } else if (v->is_object()) {
    const double a = num(doc, path + ".start");
    const double b = num(doc, path + ".stop");
    if (v->contains("count")) {
      const int n = integer(doc, path + ".count", 1);
      for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    } else if (v->contains("step")) {
      const double s = positive(doc, path + ".step");
      const long n = std::lround(std::floor((b - a) / s + 1e-9));
      if (n < 0) throw ConfigError(path, "stop must not be below start");
      for (long i = 0; i <= n; ++i) out.push_back(a + i * s);
    } else {
      throw ConfigError(path, "range needs count or step");
    }
  } else {
    throw ConfigError(path, "expected a list or a range object");
  }
  if (out.empty()) throw ConfigError(path, "must not be empty");
  return out;
}

GridAxis grid_axis(const json& doc, const std::string& path) {
  GridAxis a;
  try {
    a.axis = parse_sweep_axis(text(doc, path + ".name"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ".name", e.what());
  }
  a.values = number_list(doc, path + ".values");
  return a;
}

}  // namespace

json default_config() {
  return json::parse(R"({
  "transmon": {"e_c": 0.215, "n_g": 0.0, "d": 0.0, "n_charge_cutoff": 30, "k_levels": 16},
  "resonator": {"n_fock": 100, "kappa": 0.017},
  "spectrum": {"rung_cap": 0, "modular_branches": 15, "fold_frequency": "dressed", "ground_threshold": 2.0, "excited_threshold": 3.0,
               "run_length": 3, "search_limit": 0},
  "sweep": {"e_j_over_e_c": 100.0, "delta": -2.64,
            "axis_1": {"name": "e_j_over_e_c", "values": [100.0]},
            "axis_2": {"name": "delta", "values": [-2.64]}},
  "readout": {"model": "reduced", "chi_z": -0.00866, "omega_r": 9.3, "n_fock": 40, "alpha_f": [2.0, 3.0, 4.0],
              "tau": 10.0, "omega_d": 0.0, "dt": 0.02, "n_traj": 2000,
              "tau_grid": {"start": 2.0, "stop": 60.0, "step": 2.0}, "max_norm_correction": 0.1},
  "classical": {"omega_d_tilde": 0.0, "section_photons": 49.0, "section_periods": 300, "section_trajectories": 16,
                "steps_per_period": 500, "charge_calibration": 0.0, "calibration_chi": -0.0128,
                "calibration_delta": -2.64,
                "deviation_photons": [1, 2, 3, 5, 7, 10, 15, 20, 25, 30, 40, 50, 60, 80, 100, 130, 160, 200, 250],
                "deviation_samples": 200, "deviation_periods": 50, "bs_points": 256, "crossover": 3.141592653589793},
  "sw": {"levels": [0, 1], "m_max": 10, "resonance_tolerance": 0.001, "compare_exact": true},
  "seed": 1,
  "workers": 0,
  "out": "out",
  "plot": true
})");
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* cur = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError(path, "empty key in override path");
    if (dot == std::string::npos) {
      (*cur)[key] = value;
      break;
    }
    if (!cur->contains(key) || !(*cur)[key].is_object()) (*cur)[key] = json::object();
    cur = &(*cur)[key];
    start = dot + 1;
  }
}

json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
}

TransmonSpec RunConfig::transmon() const {
  const json& d = resolved;
  TransmonSpec t;
  const json* circ = find(d, "circuit");
  if (circ) {
    CircuitElements el{positive(d, "circuit.c"), positive(d, "circuit.c_r"), positive(d, "circuit.l_r"),
                       positive(d, "circuit.e_j1"), positive(d, "circuit.e_j2")};
    t = reduce_circuit(el).first;
  }
  if (find(d, "transmon.e_c") && !circ) t.e_c = positive(d, "transmon.e_c");
  if (find(d, "transmon.e_j")) {
    t.e_j = positive(d, "transmon.e_j");
  } else if (find(d, "transmon.e_j_over_e_c")) {
    t.e_j = positive(d, "transmon.e_j_over_e_c") * t.e_c;
  } else if (!circ) {
    throw ConfigError("transmon.e_j", "required (or transmon.e_j_over_e_c)");
  }
  t.n_g = num(d, "transmon.n_g");
  if (!circ || find(d, "transmon.d")->get<double>() != 0.0) t.d = num(d, "transmon.d");
  t.n_charge_cutoff = integer(d, "transmon.n_charge_cutoff", 1);
  t.k_levels = integer(d, "transmon.k_levels", 2);
  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("transmon", e.what());
  }
  return t;
}

ResonatorSpec RunConfig::resonator() const {
  const json& d = resolved;
  const TransmonSpec t = transmon();
  ResonatorSpec r;
  const json* circ = find(d, "circuit");
  if (circ) {
    CircuitElements el{positive(d, "circuit.c"), positive(d, "circuit.c_r"), positive(d, "circuit.l_r"),
                       positive(d, "circuit.e_j1"), positive(d, "circuit.e_j2")};
    r = reduce_circuit(el).second;
  }
  r.n_fock = integer(d, "resonator.n_fock", 2);
  r.kappa = non_negative(d, "resonator.kappa");
  const bool has_w = find(d, "resonator.omega_r"), has_delta = find(d, "resonator.delta");
  if (has_w && has_delta) throw ConfigError("resonator.delta", "give either omega_r or delta, not both");
  if (has_w) {
    r.omega_r = positive(d, "resonator.omega_r");
  } else if (has_delta) {
    r.omega_r = transmon_eigensystem(t).energies(1) - num(d, "resonator.delta");
    if (!(r.omega_r > 0.0)) throw ConfigError("resonator.delta", "gives a non-positive resonator frequency");
  } else if (!circ) {
    throw ConfigError("resonator.omega_r", "required (or resonator.delta)");
  }
  const bool has_phi = find(d, "resonator.phi_rzpf"), has_chi = find(d, "resonator.chi_z");
  if (has_phi && has_chi) throw ConfigError("resonator.chi_z", "give either phi_rzpf or chi_z, not both");
  if (has_phi) {
    r.phi_rzpf = non_negative(d, "resonator.phi_rzpf");
  } else if (has_chi) {
    try {
      r.phi_rzpf = phi_rzpf_for_chi(t, num(d, "resonator.chi_z"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("resonator.chi_z", e.what());
    }
  } else if (!circ) {
    throw ConfigError("resonator.phi_rzpf", "required (or resonator.chi_z)");
  }
  try {
    r.validate();
  } catch (const std::exception& e) {
    throw ConfigError("resonator", e.what());
  }
  return r;
}

RunConfig parse_config(const json& user) {
  if (!user.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  const json defaults = default_config();
  check_keys(user, defaults, "");
  RunConfig cfg;
  cfg.resolved = defaults;
  cfg.resolved.merge_patch(user);
  const json& d = cfg.resolved;

  cfg.seed = static_cast<std::uint64_t>(integer(d, "seed", 0));
  const int w = integer(d, "workers", 0);
  cfg.workers = w > 0 ? w : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  cfg.out = text(d, "out");
  cfg.plot = boolean(d, "plot");

  // numeric checks on the transmon block are deferred to transmon(), but the
  // generic fields are validated eagerly
  num(d, "transmon.n_g");
  num(d, "transmon.d");
  positive(d, "transmon.e_c");
  integer(d, "transmon.k_levels", 2);
  integer(d, "transmon.n_charge_cutoff", 1);
  integer(d, "resonator.n_fock", 2);

  auto& sp = cfg.spectrum;
  sp.rung_cap = integer(d, "spectrum.rung_cap", 0);
  sp.modular_branches = integer(d, "spectrum.modular_branches", 1);
  {
    const json* f = find(d, "spectrum.fold_frequency");
    if (f->is_number()) {
      sp.fold_frequency = positive(d, "spectrum.fold_frequency");
    } else if (f->is_string() && (f->get<std::string>() == "dressed" || f->get<std::string>() == "bare")) {
      sp.fold_frequency = f->get<std::string>() == "dressed" ? -1.0 : 0.0;
    } else {
      throw ConfigError("spectrum.fold_frequency", "expected \"dressed\", \"bare\" or a frequency in GHz");
    }
  }
  sp.ncrit.ground_threshold = num(d, "spectrum.ground_threshold");
  sp.ncrit.excited_threshold = num(d, "spectrum.excited_threshold");
  sp.ncrit.run_length = integer(d, "spectrum.run_length", 1);
  sp.ncrit.search_limit = integer(d, "spectrum.search_limit", 0);

  auto& sw = cfg.sweep;
  sw.e_j_over_e_c = positive(d, "sweep.e_j_over_e_c");
  sw.delta = num(d, "sweep.delta");
  sw.axis_1 = grid_axis(d, "sweep.axis_1");
  sw.axis_2 = grid_axis(d, "sweep.axis_2");
  if (sw.axis_1.axis == sw.axis_2.axis) throw ConfigError("sweep.axis_2.name", "must differ from sweep.axis_1.name");
  sw.ncrit = sp.ncrit;
  sw.workers = cfg.workers;

  auto& ro = cfg.readout;
  const std::string model = text(d, "readout.model");
  if (model == "reduced")
    ro.model.kind = ReadoutModelKind::Reduced;
  else if (model == "full")
    ro.model.kind = ReadoutModelKind::Full;
  else
    throw ConfigError("readout.model", "expected \"reduced\" or \"full\"");
  ro.model.chi_z = num(d, "readout.chi_z");
  ro.model.omega_r = positive(d, "readout.omega_r");
  ro.model.n_fock = integer(d, "readout.n_fock", 2);
  ro.alpha_f = number_list(d, "readout.alpha_f");
  for (std::size_t i = 0; i < ro.alpha_f.size(); ++i)
    if (ro.alpha_f[i] < 0.0) throw ConfigError(fmt::format("readout.alpha_f[{}]", i), "must be non-negative");
  ro.pulse.alpha_f = ro.alpha_f.front();
  ro.pulse.tau = positive(d, "readout.tau");
  ro.pulse.omega_d = non_negative(d, "readout.omega_d");
  ro.pulse.kappa = non_negative(d, "resonator.kappa");
  ro.sse.dt = positive(d, "readout.dt");
  ro.sse.max_norm_correction = positive(d, "readout.max_norm_correction");
  ro.n_traj = integer(d, "readout.n_traj", 100);
  ro.tau_grid = number_list(d, "readout.tau_grid");
  for (std::size_t i = 0; i < ro.tau_grid.size(); ++i)
    if (!(ro.tau_grid[i] > 0.0)) throw ConfigError(fmt::format("readout.tau_grid[{}]", i), "must be positive");
  ro.sse.t_end = *std::max_element(ro.tau_grid.begin(), ro.tau_grid.end());
  if (find(d, "readout.k_levels")) integer(d, "readout.k_levels", 2);

  auto& cl = cfg.classical;
  cl.omega_d_tilde = non_negative(d, "classical.omega_d_tilde");
  cl.section_photons = non_negative(d, "classical.section_photons");
  cl.section_periods = integer(d, "classical.section_periods", 1);
  cl.section_trajectories = integer(d, "classical.section_trajectories", 1);
  cl.steps_per_period = integer(d, "classical.steps_per_period", 200);
  cl.charge_calibration = non_negative(d, "classical.charge_calibration");
  cl.calibration_chi = num(d, "classical.calibration_chi");
  cl.calibration_delta = num(d, "classical.calibration_delta");
  cl.deviation_photons = number_list(d, "classical.deviation_photons");
  cl.deviation_samples = integer(d, "classical.deviation_samples", 1);
  cl.deviation_periods = integer(d, "classical.deviation_periods", 1);
  cl.bs_points = integer(d, "classical.bs_points", 4);
  cl.crossover = positive(d, "classical.crossover");

  auto& s = cfg.sw;
  s.options.levels.clear();
  const json* lv = find(d, "sw.levels");
  if (!lv || !lv->is_array() || lv->empty()) throw ConfigError("sw.levels", "expected a non-empty list of levels");
  for (std::size_t i = 0; i < lv->size(); ++i) {
    if (!(*lv)[i].is_number_integer() || (*lv)[i].get<int>() < 0)
      throw ConfigError(fmt::format("sw.levels[{}]", i), "expected a non-negative integer");
    s.options.levels.push_back((*lv)[i].get<int>());
  }
  s.options.m_max = integer(d, "sw.m_max", 0);
  s.options.resonance_tolerance = positive(d, "sw.resonance_tolerance");
  s.compare_exact = boolean(d, "sw.compare_exact");
  return cfg;
}

}  // namespace lro
