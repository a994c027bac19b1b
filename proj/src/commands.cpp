#include "lro/commands.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include <fmt/format.h>

#include "lro/classical.hpp"
#include "lro/errors.hpp"
#include "lro/io.hpp"
#include "lro/readout.hpp"
#include "lro/schrieffer_wolff.hpp"
#include "lro/spectral.hpp"

namespace lro {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string istr(long long v) { return std::to_string(v); }

json transmon_json(const TransmonSpec& t) {
  return {{"e_c", t.e_c}, {"e_j", t.e_j}, {"n_g", t.n_g}, {"d", t.d},
          {"n_charge_cutoff", t.n_charge_cutoff}, {"k_levels", t.k_levels}};
}

json resonator_json(const ResonatorSpec& r) {
  return {{"omega_r", r.omega_r}, {"phi_rzpf", r.phi_rzpf}, {"kappa", r.kappa}, {"n_fock", r.n_fock}};
}

CommandResult finish(const RunConfig& cfg, const std::string& name, CommandResult res) {
  write_run_metadata(cfg.out, name, cfg.resolved, res.summary, res.outputs);
  return res;
}

}  // namespace

CommandResult cmd_spectrum(const RunConfig& cfg) {
  const TransmonSpec t = cfg.transmon();
  const ResonatorSpec r = cfg.resonator();
  const DerivedQubitParams dp = derived_params(t, r);
  const JointEigensystem eig = diagonalize(assemble_hamiltonian(t, r));
  const BranchTable bt = label_branches(eig, cfg.spectrum.rung_cap);
  const NcritResult nc = find_ncrit(bt, cfg.spectrum.ncrit);
  std::vector<int> all(bt.k_levels);
  for (int j = 0; j < bt.k_levels; ++j) all[j] = j;
  const auto swaps = detect_swaps(bt, all, cfg.spectrum.ncrit.run_length);
  const double fold = cfg.spectrum.fold_frequency < 0.0   ? dressed_resonator_frequency(bt)
                      : cfg.spectrum.fold_frequency == 0.0 ? r.omega_r
                                                           : cfg.spectrum.fold_frequency;
  const auto modular = modular_spectrum(bt, fold, cfg.spectrum.modular_branches, bt.branches[0][0].energy);

  CommandResult res;
  fs::create_directories(cfg.out);
  CsvTable table({"branch", "rung", "eigen_index", "energy_ghz", "n_t", "n_r", "dominant_level", "parity"});
  for (int j = 0; j < bt.k_levels; ++j)
    for (int n = 0; n < bt.rung_cap; ++n) {
      const Rung& g = bt.branches[j][n];
      table.add_row({istr(j), istr(n), istr(g.eigen_index), fmt_num(g.energy), fmt_num(g.n_t), fmt_num(g.n_r),
                     istr(g.dominant_level), fmt_num(g.parity)});
    }
  table.write(cfg.out / "branch_table.csv");
  res.outputs.push_back("branch_table.csv");

  CsvTable mod({"branch", "rung", "n_r", "folded_energy_ghz"});
  for (const auto& m : modular) mod.add_row({istr(m.branch), istr(m.rung), fmt_num(m.n_r), fmt_num(m.folded)});
  mod.write(cfg.out / "modular_spectrum.csv");
  res.outputs.push_back("modular_spectrum.csv");

  if (cfg.plot) {
    PlotSpec pop{"Transmon population along branches", "N_r", "N_t", {}};
    const int shown = std::min(bt.k_levels, 8);
    for (int j = 0; j < shown; ++j) {
      Series s{fmt::format("branch {}", j), {}, {}, false, ""};
      for (int n = 0; n < bt.rung_cap; ++n) {
        s.x.push_back(bt.branches[j][n].n_r);
        s.y.push_back(bt.branches[j][n].n_t);
      }
      pop.series.push_back(std::move(s));
    }
    write_svg_plot(cfg.out / "populations.svg", pop);
    res.outputs.push_back("populations.svg");

    PlotSpec ms{fmt::format("Branch energies modulo {:.4f} GHz", fold), "N_r", "(E - E_00) mod omega (GHz)", {}};
    for (int j = 0; j < std::min(bt.k_levels, cfg.spectrum.modular_branches); ++j) {
      Series s{j < 10 ? fmt::format("branch {}", j) : "", {}, {}, true, ""};
      for (const auto& m : modular)
        if (m.branch == j) {
          s.x.push_back(m.n_r);
          s.y.push_back(m.folded);
        }
      ms.series.push_back(std::move(s));
    }
    write_svg_plot(cfg.out / "modular_spectrum.svg", ms);
    res.outputs.push_back("modular_spectrum.svg");
  }

  json sw = json::array();
  for (const auto& s : swaps)
    sw.push_back({{"branch", s.branch}, {"partner", s.partner}, {"rung", s.rung},
                  {"parity_preserving", s.parity_preserving}});
  res.summary = {{"transmon", transmon_json(t)},
                 {"resonator", resonator_json(r)},
                 {"omega_q", dp.omega_q},
                 {"delta", dp.delta},
                 {"chi_z", dp.chi_z_exact},
                 {"rung_cap", bt.rung_cap},
                 {"fold_frequency", fold},
                 {"n_crit", {{"ground", nc.n_crit_0}, {"ground_censored", nc.censored_0},
                             {"excited", nc.n_crit_1}, {"excited_censored", nc.censored_1},
                             {"value", nc.n_crit}, {"censored", nc.censored},
                             {"search_limit", nc.search_limit}}},
                 {"swaps", sw},
                 {"tie_warnings", bt.tie_warnings}};
  return finish(cfg, "spectrum", std::move(res));
}

CommandResult cmd_ncrit_map(const RunConfig& cfg) {
  SweepSpec spec = cfg.sweep;
  const json& d = cfg.resolved;
  spec.transmon.e_c = d["transmon"]["e_c"].get<double>();
  spec.transmon.n_g = d["transmon"]["n_g"].get<double>();
  spec.transmon.d = d["transmon"]["d"].get<double>();
  spec.transmon.n_charge_cutoff = d["transmon"]["n_charge_cutoff"].get<int>();
  spec.transmon.k_levels = d["transmon"]["k_levels"].get<int>();
  if (!d["resonator"].contains("phi_rzpf") || !d["resonator"]["phi_rzpf"].is_number())
    throw ConfigError("resonator.phi_rzpf", "required for ncrit-map (held fixed across the grid)");
  spec.resonator.phi_rzpf = d["resonator"]["phi_rzpf"].get<double>();
  spec.resonator.n_fock = d["resonator"]["n_fock"].get<int>();
  spec.resonator.kappa = d["resonator"]["kappa"].get<double>();
  spec.workers = cfg.workers;

  const CritMap map = sweep_ncrit(spec);
  const int n1 = static_cast<int>(map.axis_1.values.size());
  const int n2 = static_cast<int>(map.axis_2.values.size());
  const std::string a1 = sweep_axis_name(map.axis_1.axis), a2 = sweep_axis_name(map.axis_2.axis);

  CommandResult res;
  fs::create_directories(cfg.out);
  CsvTable table({"i", "j", a1, a2, "omega_r_ghz", "omega_q_ghz", "n_crit", "censored", "n_crit_ground",
                  "n_crit_excited", "trigger_branch", "partner_level", "error"});
  int failures = 0;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const std::string err = map.errors[static_cast<std::size_t>(i) * n2 + j];
      failures += !err.empty();
      table.add_row({istr(i), istr(j), fmt_num(map.axis_1.values[i]), fmt_num(map.axis_2.values[j]),
                     fmt_num(map.omega_r(i, j)), fmt_num(map.omega_q(i, j)), istr(map.n_crit(i, j)),
                     map.censored(i, j) ? "1" : "0", istr(map.n_crit_0(i, j)), istr(map.n_crit_1(i, j)),
                     istr(map.trigger_branch(i, j)), istr(map.partner_level(i, j)), err});
    }
  table.write(cfg.out / "ncrit_map.csv");
  res.outputs.push_back("ncrit_map.csv");

  if (cfg.plot) {
    HeatmapSpec hm;
    hm.title = "Critical photon number";
    hm.x_label = a2;
    hm.y_label = a1;
    hm.x_values = map.axis_2.values;
    hm.y_values = map.axis_1.values;
    hm.values = map.n_crit.cast<double>();
    hm.censored = map.censored;
    hm.failed.resize(n1, n2);
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) hm.failed(i, j) = map.failed(i, j);
    hm.value_label = "n_crit";
    write_svg_heatmap(cfg.out / "ncrit_map.svg", hm);
    res.outputs.push_back("ncrit_map.svg");
  }
  res.summary = {{"axis_1", a1}, {"axis_2", a2}, {"search_limit", map.search_limit}, {"failed_points", failures}};
  return finish(cfg, "ncrit-map", std::move(res));
}

CommandResult cmd_readout(const RunConfig& cfg) {
  const auto& ro = cfg.readout;
  EnsembleSpec spec;
  spec.model = ro.model;
  if (spec.model.kind == ReadoutModelKind::Full) {
    spec.model.transmon = cfg.transmon();
    spec.model.resonator = cfg.resonator();
    spec.model.resonator.n_fock = ro.model.n_fock;
    const json& d = cfg.resolved;
    spec.model.transmon.k_levels = d["readout"].contains("k_levels") ? d["readout"]["k_levels"].get<int>() : 6;
  }
  spec.pulse = ro.pulse;
  spec.sse = ro.sse;
  spec.n_traj = ro.n_traj;
  spec.tau_grid = ro.tau_grid;
  spec.workers = cfg.workers;

  CommandResult res;
  fs::create_directories(cfg.out);
  CsvTable table({"alpha_f", "tau_ns", "error", "ci_low", "ci_high", "n_traj", "threshold", "mean_g", "mean_e",
                  "snr_empirical", "snr_gaussian", "predicted_error"});
  CsvTable filt({"alpha_f", "t_ns", "w_re", "w_im"});
  PlotSpec plot{"Assignment error", "integration time tau (ns)", "error", {}};
  plot.log_y = true;
  json warnings = json::array();
  json curves = json::array();
  for (std::size_t a = 0; a < ro.alpha_f.size(); ++a) {
    spec.pulse.alpha_f = ro.alpha_f[a];
    spec.seed = stream_seed(cfg.seed, a);
    const ErrorCurve curve = assignment_error(spec);
    SseOptions sse = spec.sse;
    sse.t_end = *std::max_element(spec.tau_grid.begin(), spec.tau_grid.end());
    const FilterWeights w = matched_filter(spec.model, spec.pulse, sse);
    const std::size_t stride = std::max<std::size_t>(1, w.times.size() / 500);
    for (std::size_t k = 0; k < w.times.size(); k += stride)
      filt.add_row({fmt_num(ro.alpha_f[a]), fmt_num(w.times[k]), fmt_num(w.re[k]), fmt_num(w.im[k])});
    Series sim{fmt::format("alpha_f = {:g}", ro.alpha_f[a]), {}, {}, false, ""};
    Series pred{fmt::format("Gaussian, alpha_f = {:g}", ro.alpha_f[a]), {}, {}, false, ""};
    for (const auto& p : curve.points) {
      table.add_row({fmt_num(ro.alpha_f[a]), fmt_num(p.tau), fmt_num(p.error), fmt_num(p.ci_low),
                     fmt_num(p.ci_high), istr(p.n_traj), fmt_num(p.threshold), fmt_num(p.mean_g),
                     fmt_num(p.mean_e), fmt_num(p.snr_empirical), fmt_num(p.snr_gaussian),
                     fmt_num(p.predicted_error)});
      sim.x.push_back(p.tau);
      sim.y.push_back(p.error);
      pred.x.push_back(p.tau);
      pred.y.push_back(p.predicted_error);
    }
    for (const auto& wmsg : curve.warnings) warnings.push_back(wmsg);
    sim.scatter = true;
    sim.marker = 3;
    plot.series.push_back(sim);
    plot.series.push_back(pred);
    curves.push_back({{"alpha_f", ro.alpha_f[a]}, {"seed", spec.seed}});
  }
  table.write(cfg.out / "assignment_error.csv");
  filt.write(cfg.out / "filter_weights.csv");
  res.outputs = {"assignment_error.csv", "filter_weights.csv"};
  if (cfg.plot) {
    const char* pal[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};
    for (std::size_t k = 0; k < plot.series.size(); ++k) plot.series[k].color = pal[(k / 2) % 5];
    write_svg_plot(cfg.out / "assignment_error.svg", plot);
    res.outputs.push_back("assignment_error.svg");
  }
  res.summary = {{"model", spec.model.tag()}, {"curves", curves}, {"warnings", warnings}};
  return finish(cfg, "readout", std::move(res));
}

CommandResult cmd_classical(const RunConfig& cfg) {
  const auto& cl = cfg.classical;
  const TransmonSpec t = cfg.transmon();
  const double z = std::sqrt(8.0 * t.e_c / t.e_j);
  const double omega_p = std::sqrt(8.0 * t.e_j * t.e_c);
  double wd = cl.omega_d_tilde;
  double phi_rzpf = 0.0;
  const ResonatorSpec r = cfg.resonator();
  phi_rzpf = r.phi_rzpf;
  if (!(wd > 0.0)) wd = r.omega_r / omega_p;
  const double calib =
      cl.charge_calibration > 0.0
          ? cl.charge_calibration
          : charge_calibration(coupling_from_dispersive_shift(cl.calibration_chi, cl.calibration_delta, t.e_c),
                               t.e_j, t.e_c);

  CommandResult res;
  fs::create_directories(cfg.out);

  std::vector<PhasePoint> ics;
  for (int i = 0; i < cl.section_trajectories; ++i)
    ics.push_back({0.0, 2.4 * (i + 0.5) / cl.section_trajectories});
  SectionOptions so;
  so.n_periods = cl.section_periods;
  so.steps_per_period = cl.steps_per_period;
  so.workers = cfg.workers;

  const auto sep = separatrix_curve(181);
  std::vector<BohrSommerfeldOrbit> orbits;
  for (int j = 0; j < bohr_sommerfeld_count(z); ++j) {
    try {
      orbits.push_back(bohr_sommerfeld_orbit(j, z, cl.bs_points));
    } catch (const UnboundStateError&) {
      break;
    }
  }

  CsvTable sections({"drive", "photons", "amplitude", "trajectory", "period", "phi", "n"});
  struct Panel {
    std::string name;
    DriveKind kind;
  };
  for (const Panel& panel : {Panel{"undriven", DriveKind::None}, Panel{"charge", DriveKind::Charge},
                             Panel{"parametric", DriveKind::Parametric}}) {
    PendulumParams p;
    p.z = z;
    p.omega_d_tilde = wd;
    p.drive = panel.kind;
    p.amplitude = photon_amplitude(panel.kind, cl.section_photons, phi_rzpf, calib);
    const SectionData data = poincare_section(p, ics, so);
    const double photons = panel.kind == DriveKind::None ? 0.0 : cl.section_photons;
    for (std::size_t i = 0; i < data.points.size(); ++i)
      for (std::size_t k = 0; k < data.points[i].size(); ++k)
        sections.add_row({panel.name, fmt_num(photons), fmt_num(p.amplitude), istr(static_cast<long long>(i)),
                          istr(static_cast<long long>(k + 1)), fmt_num(data.points[i][k].phi),
                          fmt_num(data.points[i][k].n)});
    if (cfg.plot) {
      PlotSpec ps{fmt::format("Stroboscopic section, {} ({:g} photons)", panel.name, photons), "phi", "n", {}};
      ps.legend = false;
      ps.width = 560;
      ps.height = 480;
      Series pts{"", {}, {}, true, "#1f77b4", 0.9};
      for (const auto& tr : data.points)
        for (const auto& q : tr) {
          pts.x.push_back(q.phi);
          pts.y.push_back(q.n);
        }
      ps.series.push_back(pts);
      Series upper{"", {}, {}, false, "#d62728"}, lower{"", {}, {}, false, "#d62728"};
      for (std::size_t i = 0; i < sep.size(); ++i) {
        auto& s = i < sep.size() / 2 ? upper : lower;
        s.x.push_back(sep[i].phi);
        s.y.push_back(sep[i].n);
      }
      ps.series.push_back(upper);
      ps.series.push_back(lower);
      for (const auto& o : orbits) {
        Series s{"", {}, {}, false, "#2ca02c"};
        for (const auto& q : o.points) {
          s.x.push_back(q.phi);
          s.y.push_back(q.n);
        }
        s.x.push_back(o.points.front().phi);
        s.y.push_back(o.points.front().n);
        ps.series.push_back(s);
      }
      const std::string file = fmt::format("section_{}.svg", panel.name);
      write_svg_plot(cfg.out / file, ps);
      res.outputs.push_back(file);
    }
  }
  sections.write(cfg.out / "sections.csv");
  res.outputs.push_back("sections.csv");

  CsvTable sep_csv({"phi", "n"});
  for (const auto& q : sep) sep_csv.add_row({fmt_num(q.phi), fmt_num(q.n)});
  sep_csv.write(cfg.out / "separatrix.csv");
  res.outputs.push_back("separatrix.csv");

  CsvTable bs({"level", "energy", "area", "phi", "n"});
  for (const auto& o : orbits)
    for (const auto& q : o.points)
      bs.add_row({istr(o.level), fmt_num(o.energy), fmt_num(o.area), fmt_num(q.phi), fmt_num(q.n)});
  bs.write(cfg.out / "bs_orbits.csv");
  res.outputs.push_back("bs_orbits.csv");

  CsvTable dev({"drive", "photons", "amplitude", "mean_deviation", "std_error"});
  PlotSpec dp{"Average trajectory deviation per drive period", "photon number", "mean deviation", {}};
  json crossover;
  for (DriveKind kind : {DriveKind::Charge, DriveKind::Parametric}) {
    const std::string name = kind == DriveKind::Charge ? "charge" : "parametric";
    Series s{name, {}, {}, false, ""};
    json first = nullptr;
    for (double nb : cl.deviation_photons) {
      PendulumParams p;
      p.z = z;
      p.omega_d_tilde = wd;
      p.drive = kind;
      p.amplitude = photon_amplitude(kind, nb, phi_rzpf, calib);
      AverageDeviationOptions o;
      o.n_samples = cl.deviation_samples;
      o.seed = cfg.seed;
      o.deviation.n_periods = cl.deviation_periods;
      o.deviation.steps_per_period = cl.steps_per_period;
      o.workers = cfg.workers;
      const DeviationStats st = average_deviation(p, o);
      dev.add_row({name, fmt_num(nb), fmt_num(p.amplitude), fmt_num(st.mean), fmt_num(st.std_error)});
      s.x.push_back(nb);
      s.y.push_back(st.mean);
      if (first.is_null() && st.mean > cl.crossover) first = nb;
    }
    crossover[name] = first;
    dp.series.push_back(s);
  }
  dev.write(cfg.out / "deviation.csv");
  res.outputs.push_back("deviation.csv");
  if (cfg.plot) {
    write_svg_plot(cfg.out / "deviation.svg", dp);
    res.outputs.push_back("deviation.svg");
  }
  res.summary = {{"z", z},
                 {"omega_d_tilde", wd},
                 {"charge_calibration", calib},
                 {"phi_rzpf", phi_rzpf},
                 {"bohr_sommerfeld_count", bohr_sommerfeld_count(z)},
                 {"separatrix_area", separatrix_area()},
                 {"crossover_photons", crossover}};
  return finish(cfg, "classical", std::move(res));
}

CommandResult cmd_sw_report(const RunConfig& cfg) {
  const TransmonSpec t = cfg.transmon();
  const ResonatorSpec r = cfg.resonator();
  const DiagonalModel dm = sw_diagonal(t, r);
  CommandResult res;
  fs::create_directories(cfg.out);

  CsvTable diag({"level", "m", "diag_energy_ghz", "chi_exact_ghz"});
  for (int j = 0; j < dm.diag_energy.rows(); ++j)
    for (int m = 0; m < dm.diag_energy.cols(); ++m)
      diag.add_row({istr(j), istr(m), fmt_num(dm.diag_energy(j, m)), fmt_num(dm.chi_exact(j, m))});
  diag.write(cfg.out / "sw_diagonal.csv");
  res.outputs.push_back("sw_diagonal.csv");

  CsvTable lamb({"level", "lamb_shift_ghz"});
  for (int j = 0; j < dm.lamb.size(); ++j) lamb.add_row({istr(j), fmt_num(dm.lamb(j))});
  lamb.write(cfg.out / "lamb_shift.csv");
  res.outputs.push_back("lamb_shift.csv");

  res.summary = {{"transmon", transmon_json(t)}, {"resonator", resonator_json(r)}, {"chi_z0", dm.chi_z0}};
  try {
    const SwCorrectedSpectrum sw = sw_second_order(t, r, cfg.sw.options);
    std::optional<BranchTable> bt;
    if (cfg.sw.compare_exact) bt = label_branches(diagonalize(assemble_hamiltonian(t, r)));
    CsvTable en({"level", "m", "zeroth_order_ghz", "shift2_ghz", "energy2_ghz", "exact_ghz", "abs_error_ghz"});
    double worst = 0.0;
    for (std::size_t li = 0; li < sw.levels.size(); ++li)
      for (int m = 0; m <= sw.m_max; ++m) {
        const int j = sw.levels[li];
        double exact = std::nan(""), err = std::nan("");
        if (bt && m < bt->rung_cap) {
          exact = bt->branches[j][m].energy;
          err = std::abs(exact - sw.energy2(li, m));
          worst = std::max(worst, err);
        }
        en.add_row({istr(j), istr(m), fmt_num(dm.diag_energy(j, m)), fmt_num(sw.shift2(li, m)),
                    fmt_num(sw.energy2(li, m)), fmt_num(exact), fmt_num(err)});
      }
    en.write(cfg.out / "sw_energies.csv");
    res.outputs.push_back("sw_energies.csv");
    if (bt) res.summary["max_abs_error"] = worst;
  } catch (const NearResonanceError& e) {
    res.summary["near_resonance"] = {{"message", e.what()},
                                     {"state_i", {e.level_i, e.photons_i}},
                                     {"state_k", {e.level_k, e.photons_k}},
                                     {"denominator", e.denominator}};
    res.exit_code = 3;
  }
  return finish(cfg, "sw-report", std::move(res));
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"spectrum", "ncrit-map", "readout", "classical", "sw-report"};
  return names;
}

CommandResult run_command(const std::string& name, const RunConfig& cfg) {
  pin_blas_single_thread();
  if (name == "spectrum") return cmd_spectrum(cfg);
  if (name == "ncrit-map") return cmd_ncrit_map(cfg);
  if (name == "readout") return cmd_readout(cfg);
  if (name == "classical") return cmd_classical(cfg);
  if (name == "sw-report") return cmd_sw_report(cfg);
  throw std::invalid_argument("unknown command '" + name + "'");
}

}  // namespace lro
