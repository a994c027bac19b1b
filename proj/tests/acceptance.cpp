// Acceptance suite: one PASS/FAIL line per criterion.
//
//   lro_acceptance            run all criteria
//   lro_acceptance 3 7        run a subset
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "lro/circuit.hpp"
#include "lro/classical.hpp"
#include "lro/commands.hpp"
#include "lro/config.hpp"
#include "lro/errors.hpp"
#include "lro/io.hpp"
#include "lro/readout.hpp"
#include "lro/schrieffer_wolff.hpp"
#include "lro/spectral.hpp"

using namespace lro;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_workers = 1;

TransmonSpec transmon(double e_c, double ratio, int k = 16) {
  TransmonSpec t;
  t.e_c = e_c;
  t.e_j = ratio * e_c;
  t.k_levels = k;
  return t;
}

ResonatorSpec resonator(double omega, double phi, int n) {
  ResonatorSpec r;
  r.omega_r = omega;
  r.phi_rzpf = phi;
  r.n_fock = n;
  return r;
}

BranchTable branches(const TransmonSpec& t, const ResonatorSpec& r) {
  return label_branches(diagonalize(assemble_hamiltonian(t, r)));
}

// 1. detuning at the two resonator frequencies
Outcome detuning() {
  const auto t = transmon(0.215, 110);
  const double wq = transmon_eigensystem(t).energies(1);
  const double d1 = wq - 8.8, d2 = wq - 10.5;
  const bool ok = std::abs(d1 + 2.64) <= 0.03 && std::abs(d2 + 4.34) <= 0.03;
  return {ok, fmt::format("Delta(8.8) = {:.5f} GHz (target -2.64 +- 0.03), Delta(10.5) = {:.5f} GHz (target -4.34 +- 0.03)", d1, d2)};
}

// 2. chi_z independent of the resonator frequency
Outcome chi_independence() {
  const auto t = transmon(0.215, 110);
  const auto a = sw_diagonal(t, resonator(8.8, 0.0896, 20));
  const auto b = sw_diagonal(t, resonator(10.5, 0.0896, 20));
  const double diff = std::abs(a.chi_z0 - b.chi_z0);
  const double rel = std::abs(a.chi_z0 / -0.0128 - 1.0);
  const bool ok = diff <= 1e-12 && rel <= 0.10;
  return {ok, fmt::format("chi_z(8.8) = {:.6f} MHz, chi_z(10.5) = {:.6f} MHz, |diff| = {:.2e} GHz (<= 1e-12), "
                          "deviation from -12.8 MHz = {:.1f}% (<= 10%)",
                          a.chi_z0 * 1e3, b.chi_z0 * 1e3, diff, rel * 100)};
}

// 3. branch swaps present at 8.8 GHz, absent at 10.5 GHz, parity preserving
Outcome branch_swaps() {
  const auto t = transmon(0.215, 110);
  std::vector<int> all(16);
  std::iota(all.begin(), all.end(), 0);
  const auto bt_a = branches(t, resonator(8.8, 0.0896, 100));
  const auto bt_c = branches(t, resonator(10.5, 0.0896, 100));
  const int limit = std::min(100, bt_a.rung_cap);
  const auto comp_a = detect_swaps(bt_a, {0, 1}, 3, limit);
  const auto comp_c = detect_swaps(bt_c, {0, 1}, 3, limit);
  int total = 0, parity_ok = 0;
  for (const auto* bt : {&bt_a, &bt_c})
    for (const auto& s : detect_swaps(*bt, all, 3, limit)) {
      ++total;
      parity_ok += s.parity_preserving;
    }
  std::string list;
  for (const auto& s : comp_a) list += fmt::format(" {}<->{}@{}", s.branch, s.partner, s.rung);
  const bool ok = !comp_a.empty() && comp_c.empty() && parity_ok == total;
  return {ok, fmt::format("8.8 GHz computational swaps:{} ({}); 10.5 GHz: {}; parity-preserving {}/{} over all branches",
                          list.empty() ? " none" : list, comp_a.size(), comp_c.size(), parity_ok, total)};
}

// 4. n_crit for the readout parameter set
Outcome ncrit_readout() {
  const auto t = transmon(0.214867, 50);
  const double phi = phi_rzpf_for_chi(t, -0.00866);
  const auto bt = branches(t, resonator(9.3, phi, 250));
  const auto nc = find_ncrit(bt);
  const bool ok = !nc.censored && nc.n_crit >= 136 && nc.n_crit <= 204;
  return {ok, fmt::format("phi_rzpf = {:.6f}, n_crit = {}{} (ground {}, excited {}; target 170 +- 20% = [136, 204])", phi,
                          nc.n_crit, nc.censored ? " (censored)" : "", nc.n_crit_0, nc.n_crit_1)};
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j);
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

// 5. structure of the (E_J/E_C, Delta) map
Outcome ncrit_map_structure() {
  SweepSpec s;
  s.transmon = transmon(0.215, 100);
  s.resonator = resonator(8.8, 0.09, 120);
  s.axis_1 = {SweepAxis::EjOverEc, linspace(50, 120, 8)};
  s.axis_2 = {SweepAxis::Delta, linspace(-1.5, -6.0, 8)};
  s.workers = g_workers;
  const auto map = sweep_ncrit(s);
  const int rows = 8, cols = 8;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (map.failed(i, j)) return {false, fmt::format("grid point ({}, {}) failed: {}", i, j, map.errors[i * cols + j])};
  const int lim = map.search_limit;

  std::vector<double> row_idx, band_col;
  std::vector<int> band(rows);
  int attributed = 0, near_resonance = 0, outer_ok = 0;
  std::vector<double> tier_band, tier_near, tier_far;
  std::string bands;
  for (int i = 0; i < rows; ++i) {
    int b = 0;
    for (int j = 1; j < cols; ++j)
      if (map.n_crit(i, j) < map.n_crit(i, b)) b = j;
    band[i] = b;
    row_idx.push_back(i);
    band_col.push_back(b);
    // bare two-photon 1 <-> 5 resonance, omega_r = (E_5 - E_1) / 2
    const auto e = transmon_eigensystem(transmon(0.215, s.axis_1.values[i], 8)).energies;
    const double delta_star = e(1) - 0.5 * (e(5) - e(1));
    int c_star = 0;
    for (int j = 1; j < cols; ++j)
      if (std::abs(s.axis_2.values[j] - delta_star) < std::abs(s.axis_2.values[c_star] - delta_star)) c_star = j;
    near_resonance += (b <= c_star && b >= c_star - 2);
    attributed += (map.trigger_branch(i, b) == 1 && map.partner_level(i, b) == 5);
    const int outer = map.n_crit(i, cols - 1);
    outer_ok += (map.censored(i, cols - 1) || outer >= 2 * map.n_crit(i, b));
    for (int j = b; j < cols; ++j) {
      const int off = j - b;
      (off == 0 ? tier_band : off <= 2 ? tier_near : tier_far).push_back(map.n_crit(i, j));
    }
    bands += fmt::format(" {}:{}@{}", static_cast<int>(s.axis_1.values[i]), map.n_crit(i, b), b);
  }
  auto mean = [](const std::vector<double>& v) { return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  const double rho = spearman(row_idx, band_col);
  const bool band_ok = rho >= 0.8 && band.back() > band.front();
  const bool attribution_ok = near_resonance == rows && 2 * attributed >= rows;
  const bool monotone_ok = mean(tier_band) < mean(tier_near) && mean(tier_near) <= mean(tier_far) && outer_ok == rows;

  // robustness at E_J/E_C = 100 on the two largest detunings; a point censored at
  // N = 120 is redone at N = 200 so that changes are measured between resolved values
  struct Resolved {
    int n_crit = 0;
    bool censored = true;
    int n_fock = 0;
  };
  auto resolve = [&](SweepAxis axis, double value, double delta) {
    Resolved out;
    for (int n : {120, 200}) {
      SweepSpec p = s;
      p.e_j_over_e_c = 100;
      p.resonator.n_fock = n;
      p.axis_1 = {axis, {value}};
      p.axis_2 = {SweepAxis::Delta, {delta}};
      const auto [t, r] = sweep_point(p, value, delta);
      const auto nc = ncrit_for(t, r);
      out = {nc.n_crit, nc.censored, n};
      if (!nc.censored) break;
    }
    return out;
  };
  double worst = 0.0;
  bool unresolved = false;
  std::string rob;
  for (int j = 0; j < 2; ++j) {
    const double delta = s.axis_2.values[cols - 2 + j];
    const auto base = resolve(SweepAxis::Asymmetry, 0.0, delta);
    rob += fmt::format(" Delta={:.3f}: base {}{}(N={})", delta, base.n_crit, base.censored ? "*" : "", base.n_fock);
    for (auto [axis, value] : std::vector<std::pair<SweepAxis, double>>{{SweepAxis::Asymmetry, 0.02},
                                                                        {SweepAxis::Asymmetry, 0.05},
                                                                        {SweepAxis::GateCharge, 0.25},
                                                                        {SweepAxis::GateCharge, 0.5}}) {
      const auto v = resolve(axis, value, delta);
      rob += fmt::format(" {}={:g}:{}{}(N={})", sweep_axis_name(axis), value, v.n_crit, v.censored ? "*" : "", v.n_fock);
      if (base.censored && v.censored) continue;
      if (base.censored || v.censored) {
        unresolved = true;
        continue;
      }
      worst = std::max(worst, std::abs(v.n_crit - base.n_crit) / double(base.n_crit));
    }
  }
  const bool robust_ok = worst < 0.5 && !unresolved;
  const bool ok = band_ok && attribution_ok && monotone_ok && robust_ok;
  return {ok, fmt::format("limit {}; band n_crit@col{} ; rank corr {:.2f} [{}]; band within 2 cols inside the 1<->5 "
                          "resonance {}/{}, triggered 1->5 {}/{} [{}]; tier means band {:.1f} < near {:.1f} <= far {:.1f}, "
                          "outer column escaped {}/{} [{}]; robustness max change {:.0f}% (< 50%){}{} [{}]",
                          lim, bands, rho, band_ok ? "ok" : "FAIL", near_resonance, rows, attributed, rows,
                          attribution_ok ? "ok" : "FAIL", mean(tier_band), mean(tier_near), mean(tier_far), outer_ok, rows,
                          monotone_ok ? "ok" : "FAIL", worst * 100, unresolved ? " (censoring unresolved)" : "", rob,
                          robust_ok ? "ok" : "FAIL")};
}

double sw_max_error(double phi) {
  const auto t = transmon(0.215, 110);
  const auto r = resonator(8.8, phi, 100);
  SwOptions o;
  o.m_max = 10;
  const auto sw = sw_second_order(t, r, o);
  const auto bt = branches(t, r);
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int m = 0; m <= 10; ++m) worst = std::max(worst, std::abs(sw.energy2(i, m) - bt.branches[i][m].energy));
  return worst;
}

// 6. second-order energies against exact eigenvalues
Outcome sw_accuracy() {
  const double e1 = sw_max_error(0.09), e2 = sw_max_error(0.045), e3 = sw_max_error(0.0225);
  const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
  const bool abs_ok = e1 < 1e-4;
  const bool scale_ok = p1 >= 5.0 && p1 <= 7.0;
  return {abs_ok && scale_ok,
          fmt::format("max |E_SW - E_exact| for j in {{0,1}}, m <= 10: {:.3e} GHz at phi 0.09 (< 1e-4) [{}]; "
                      "{:.3e} at 0.045, {:.3e} at 0.0225; exponents {:.2f}, {:.2f} (expect 6 +- 1) [{}]",
                      e1, abs_ok ? "ok" : "FAIL", e2, e3, p1, p2, scale_ok ? "ok" : "FAIL")};
}

// 7. displacement matrix against the truncated matrix exponential
Outcome displacement_oracle() {
  const int n = 60, interior = 40;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
  double worst = 0.0;
  for (cplx alpha : {cplx(0.2, 0), cplx(0, 0.2), std::polar(0.2, kPi / 4), std::polar(0.13, -2.0), cplx(0.05, 0)}) {
    Eigen::MatrixXcd gen = alpha * a.adjoint() - std::conj(alpha) * a;
    Eigen::MatrixXcd ref = gen.exp();
    const auto d = displacement_matrix(alpha, n);
    worst = std::max(worst, (d - ref).topLeftCorner(interior, interior).cwiseAbs().maxCoeff());
  }
  return {worst < 1e-8, fmt::format("N = 60, |alpha| <= 0.2, interior 40x40 block: max |diff| = {:.2e} (< 1e-8)", worst)};
}

// 8. classical suite
Outcome classical_suite() {
  const double e_c = 0.215, e_j = 110 * e_c;
  const double z = std::sqrt(8 * e_c / e_j);
  const double omega_p = std::sqrt(8 * e_j * e_c);

  PendulumParams free{z, DriveKind::None, 0.0, 8.8 / omega_p};
  const int spp = 500;
  const double dt = free.period() / spp;
  double drift = 0.0;
  for (double u : {0.1, 0.5, 0.9}) {
    PhasePoint s = sample_initial_condition(z, u, 0.3);
    const double e0 = pendulum_energy(s);
    double t = 0.0;
    for (int k = 0; k < 1000; ++k) {
      s = integrate(free, s, t, dt, spp);
      t += spp * dt;
      drift = std::max(drift, std::abs(pendulum_energy(s) - e0));
    }
  }
  const bool drift_ok = drift < 1e-8;

  const double area = separatrix_area();
  const bool area_ok = std::abs(area - 16.0) <= 1e-6;

  int bound = 0;
  for (int j = 0; j < 50; ++j) {
    try {
      bohr_sommerfeld_orbit(j, z, 16);
      ++bound;
    } catch (const UnboundStateError&) {
      break;
    }
  }
  const bool bs_ok = bound == 9 && bohr_sommerfeld_count(z) == 9;

  const double calib = charge_calibration(coupling_from_dispersive_shift(-0.0128, -2.64, e_c), e_j, e_c);
  const std::vector<double> photons{1, 2, 3, 5, 7, 10, 15, 20, 25, 30, 40, 50, 60, 80, 100, 130, 160, 200, 250};
  auto crossover = [&](DriveKind kind) {
    for (double nb : photons) {
      PendulumParams p{z, kind, photon_amplitude(kind, nb, 0.09, calib), 8.8 / omega_p};
      AverageDeviationOptions o;
      o.n_samples = 200;
      o.seed = 2024;
      o.deviation.n_periods = 50;
      o.deviation.steps_per_period = 500;
      o.workers = g_workers;
      if (average_deviation(p, o).mean > kPi) return nb;
    }
    return std::numeric_limits<double>::infinity();
  };
  const double n_charge = crossover(DriveKind::Charge);
  const double n_param = crossover(DriveKind::Parametric);
  const bool ratio_ok = std::isfinite(n_charge) && n_param >= 3 * n_charge;

  return {drift_ok && area_ok && bs_ok && ratio_ok,
          fmt::format("energy drift over 1e3 periods {:.2e} (< 1e-8) [{}]; separatrix area {:.12f} (16 +- 1e-6) [{}]; "
                      "bound Bohr-Sommerfeld states {} (= 9) [{}]; deviation crossover charge {:g}, parametric {:g} photons, "
                      "ratio {:.2f} (>= 3) [{}]",
                      drift, drift_ok ? "ok" : "FAIL", area, area_ok ? "ok" : "FAIL", bound, bs_ok ? "ok" : "FAIL", n_charge,
                      n_param, n_param / n_charge, ratio_ok ? "ok" : "FAIL")};
}

// 9. readout assignment error, reduced model
Outcome readout_error() {
  EnsembleSpec s;
  s.model.kind = ReadoutModelKind::Reduced;
  s.model.chi_z = -0.00866;
  s.model.omega_r = 9.3;
  s.model.n_fock = 30;
  s.pulse.alpha_f = 2.0;
  s.pulse.tau = 10.0;
  s.pulse.kappa = 0.017;
  s.sse.dt = 0.02;
  s.sse.t_end = 50.0;
  s.n_traj = 2000;
  s.tau_grid = linspace(5, 50, 10);
  s.seed = 7;
  s.workers = g_workers;
  const auto curve = assignment_error(s);
  const auto& pts = curve.points;
  bool monotone = true;
  for (std::size_t k = 1; k < pts.size(); ++k) monotone &= pts[k].error <= pts[k - 1].error;
  double worst_ratio = 1.0;
  int compared = 0;
  std::string table;
  for (const auto& p : pts) {
    table += fmt::format(" {:g}:{:.3g}/{:.3g}", p.tau, p.error, p.predicted_error);
    if (p.predicted_error < 5e-3 || p.predicted_error > 0.4) continue;
    ++compared;
    const double r = p.error > 0 ? std::max(p.error / p.predicted_error, p.predicted_error / p.error)
                                 : std::numeric_limits<double>::infinity();
    worst_ratio = std::max(worst_ratio, r);
  }
  const double final_error = pts.back().error;
  const bool final_ok = final_error <= 1e-2;
  const bool factor_ok = compared >= 3 && worst_ratio <= 3.0;
  return {final_ok && monotone && factor_ok,
          fmt::format("error(50 ns) = {:.2e} (<= 1e-2) [{}]; non-increasing [{}]; worst SSE/Gaussian factor {:.2f} over {} "
                      "points with prediction in [5e-3, 0.4] (<= 3) [{}]; tau:error/prediction{}",
                      final_error, final_ok ? "ok" : "FAIL", monotone ? "ok" : "FAIL", worst_ratio, compared,
                      factor_ok ? "ok" : "FAIL", table)};
}

std::map<std::string, std::string> csv_files(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

// 10. byte-identical CSV output across reruns and worker counts
Outcome determinism() {
  const std::map<std::string, json> configs{
      {"spectrum", json::parse(R"({"transmon": {"e_j_over_e_c": 110, "k_levels": 8},
                                   "resonator": {"omega_r": 8.8, "phi_rzpf": 0.09, "n_fock": 40}})")},
      {"ncrit-map", json::parse(R"({"transmon": {"k_levels": 6}, "resonator": {"phi_rzpf": 0.09, "n_fock": 40},
                                    "sweep": {"axis_1": {"name": "e_j_over_e_c", "values": [60, 100]},
                                              "axis_2": {"name": "delta", "values": [-2.0, -4.0]}}})")},
      {"readout", json::parse(R"({"readout": {"alpha_f": [2], "n_traj": 100, "n_fock": 20,
                                              "tau_grid": {"start": 10, "stop": 20, "step": 10}}})")},
      {"classical", json::parse(R"({"transmon": {"e_j_over_e_c": 110}, "resonator": {"omega_r": 8.8, "phi_rzpf": 0.09},
                                    "classical": {"section_periods": 20, "section_trajectories": 4, "steps_per_period": 200,
                                                  "deviation_photons": [5, 60], "deviation_samples": 8,
                                                  "deviation_periods": 5, "bs_points": 32}})")},
      {"sw-report", json::parse(R"({"transmon": {"e_j_over_e_c": 110, "k_levels": 12},
                                    "resonator": {"omega_r": 8.8, "phi_rzpf": 0.09, "n_fock": 40}, "sw": {"m_max": 5}})")},
  };
  const auto root = std::filesystem::temp_directory_path() / fmt::format("lro_acceptance_{}", ::getpid());
  std::vector<std::string> bad;
  int files = 0;
  for (const auto& [name, base] : configs) {
    std::vector<std::map<std::string, std::string>> runs;
    for (int w : {1, 3, 3}) {
      json doc = base;
      doc["seed"] = 17;
      doc["workers"] = w;
      doc["plot"] = false;
      doc["out"] = (root / fmt::format("{}_{}_{}", name, w, runs.size())).string();
      const auto cfg = parse_config(doc);
      run_command(name, cfg);
      runs.push_back(csv_files(cfg.out));
    }
    files += runs[0].size();
    if (runs[0].empty() || runs[0] != runs[1] || runs[1] != runs[2]) bad.push_back(name);
  }
  std::filesystem::remove_all(root);
  std::string failed;
  for (const auto& b : bad) failed += " " + b;
  return {bad.empty(), fmt::format("{} subcommands, {} CSV files compared across workers 1/3/3: {}", configs.size(), files,
                                   bad.empty() ? "identical" : "differ in" + failed)};
}

}  // namespace

int main(int argc, char** argv) {
  pin_blas_single_thread();
  g_workers = resolve_workers(static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"detuning values", detuning},
      {"dispersive shift independent of detuning", chi_independence},
      {"branch swaps and parity", branch_swaps},
      {"critical photon number of the readout set", ncrit_readout},
      {"n_crit map structure and robustness", ncrit_map_structure},
      {"second-order Schrieffer-Wolff accuracy", sw_accuracy},
      {"displacement operator oracle", displacement_oracle},
      {"classical pendulum suite", classical_suite},
      {"readout assignment error", readout_error},
      {"determinism", determinism},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    fmt::print("{} criterion {:2d} ({}): {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail, secs);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
