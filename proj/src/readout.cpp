#include "lro/readout.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "lro/errors.hpp"
#include "lro/spectral.hpp"

namespace lro {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double kappa_angular(const PulseSpec& p) { return kTwoPi * p.kappa; }

// Propagation data shared by stochastic and noise-free runs.
struct Engine {
  int k = 1;  // transmon levels (1 for the reduced model)
  int n = 0;  // Fock states
  bool lab_frame = false;
  double omega_d = 0.0;  // GHz
  Eigen::VectorXcd free_diag;  // reduced: per-step phases
  Eigen::MatrixXcd free_dense;  // full: exp(-i 2pi H dt)
  Eigen::VectorXcd initial;
  int dim() const { return k * n; }
};

void apply_a(const Engine& e, const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) {
  out.setZero(psi.size());
  for (int j = 0; j < e.k; ++j)
    for (int m = 0; m + 1 < e.n; ++m) out(j * e.n + m) = std::sqrt(m + 1.0) * psi(j * e.n + m + 1);
}

void apply_adag(const Engine& e, const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) {
  out.setZero(psi.size());
  for (int j = 0; j < e.k; ++j)
    for (int m = 1; m < e.n; ++m) out(j * e.n + m) = std::sqrt(static_cast<double>(m)) * psi(j * e.n + m - 1);
}

double qubit_sign(int qubit_init) {
  if (qubit_init != 0 && qubit_init != 1) throw std::invalid_argument("qubit_init must be 0 or 1");
  return qubit_init == 1 ? 1.0 : -1.0;
}

struct FullSetup {
  JointEigensystem eig;
  BranchTable table;
};

FullSetup full_setup(const ReadoutModel& model) {
  FullSetup s;
  s.eig = diagonalize(assemble_hamiltonian(model.transmon, model.resonator));
  s.table = label_branches(s.eig, model.resonator.n_fock);
  return s;
}

double drive_frequency(const ReadoutModel& model, const PulseSpec& p) {
  if (p.omega_d > 0.0) return p.omega_d;
  return model.kind == ReadoutModelKind::Reduced ? model.omega_r : dressed_resonator_frequency(model);
}

Engine make_engine(const ReadoutModel& model, const PulseSpec& p, double dt, int qubit_init) {
  Engine e;
  e.omega_d = drive_frequency(model, p);
  if (model.kind == ReadoutModelKind::Reduced) {
    if (model.n_fock < 2) throw std::invalid_argument("reduced model: n_fock must be >= 2");
    const double s = qubit_sign(qubit_init);
    e.k = 1;
    e.n = model.n_fock;
    const double w = kTwoPi * (model.omega_r - e.omega_d + s * model.chi_z);
    e.free_diag.resize(e.n);
    for (int m = 0; m < e.n; ++m) e.free_diag(m) = std::polar(1.0, -w * m * dt);
    e.initial = Eigen::VectorXcd::Zero(e.n);
    e.initial(0) = 1.0;
    return e;
  }
  qubit_sign(qubit_init);
  const FullSetup setup = full_setup(model);
  e.k = setup.eig.k_levels;
  e.n = setup.eig.n_fock;
  e.lab_frame = true;
  const double dt_max = 1.0 / (40.0 * e.omega_d);  // pi / (20 omega_d), angular omega_d
  if (dt > dt_max * (1.0 + 1e-9))
    throw std::invalid_argument(fmt::format("full model: dt must be <= pi/(20 omega_d) = {:.6g} ns", dt_max));
  Eigen::VectorXcd phases(e.dim());
  for (int i = 0; i < e.dim(); ++i) phases(i) = std::polar(1.0, -kTwoPi * setup.eig.eigenvalues(i) * dt);
  std::visit(
      [&](const auto& v) {
        const Eigen::MatrixXcd vc = v.template cast<cplx>();
        e.free_dense = vc * phases.asDiagonal() * vc.adjoint();
      },
      setup.eig.solution.vectors);
  e.initial = setup.eig.vector(setup.table.branches[qubit_init][0].eigen_index);
  return e;
}

// Runs the (optionally noisy) evolution; `on_bin(k, t, dJ_demod, psi)` is
// called for each bin with the demodulated increment.
template <class OnBin>
Eigen::VectorXcd run(const Engine& e, const PulseSpec& p, const SseOptions& o, std::mt19937_64* rng,
                     double& max_correction, OnBin on_bin) {
  const long steps = std::lround(o.t_end / o.dt);
  if (steps < 1) throw std::invalid_argument("sse: t_end must cover at least one step");
  const double dt = o.dt;
  const double kappa = kappa_angular(p);
  const double sk = std::sqrt(kappa);
  const double noise_scale = std::sqrt(0.5 * dt);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::VectorXcd psi = e.initial;
  Eigen::VectorXcd apsi(e.dim()), adpsi(e.dim()), next(e.dim());
  max_correction = 0.0;
  for (long s = 0; s < steps; ++s) {
    const double t = s * dt;
    apply_a(e, psi, apsi);
    apply_adag(e, psi, adpsi);
    const cplx ea = psi.dot(apsi);  // conj(psi) . a psi
    cplx dz = 0.0;
    if (rng) {
      const double w1 = gauss(*rng);
      const double w2 = gauss(*rng);
      dz = cplx(w1, w2) * noise_scale;
    }
    const cplx dj = sk * ea * dt + dz;
    const double eps = pulse_amplitude(p, t);
    const double drive = e.lab_frame ? eps * std::cos(kTwoPi * e.omega_d * t) : 0.5 * eps;
    // d psi = [-i H_d - (kappa/2)(a^dag a - 2 <a>* a + |<a>|^2)] psi dt + sqrt(kappa) (a - <a>) psi dZ*
    next = psi * (1.0 - 0.5 * kappa * std::norm(ea) * dt) - sk * std::conj(dz) * ea * psi;
    next.noalias() -= (drive * dt) * (apsi - adpsi);
    for (int j = 0; j < e.k; ++j)
      for (int m = 0; m < e.n; ++m) next(j * e.n + m) -= (0.5 * kappa * m * dt) * psi(j * e.n + m);
    next.noalias() += (kappa * std::conj(ea) * dt + sk * std::conj(dz)) * apsi;
    const double norm = next.norm();
    const double corr = std::abs(norm - 1.0);
    max_correction = std::max(max_correction, corr);
    if (!(corr <= o.max_norm_correction))
      throw NormDivergenceError(fmt::format("norm changed by {:.3g} in one step at t = {:.4g} ns; reduce dt", corr, t));
    next /= norm;
    if (e.lab_frame)
      psi.noalias() = e.free_dense * next;
    else
      psi = next.cwiseProduct(e.free_diag);
    const cplx demod = e.lab_frame ? dj * std::polar(1.0, kTwoPi * e.omega_d * t) : dj;
    on_bin(s, t, demod, ea);
  }
  return psi;
}

}  // namespace

void PulseSpec::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("pulse: tau must be positive");
  if (!(alpha_f >= 0.0)) throw std::invalid_argument("pulse: alpha_f must be real and non-negative");
  if (!(kappa >= 0.0)) throw std::invalid_argument("pulse: kappa must be non-negative");
}

double cavity_response(const PulseSpec& p, double t) {
  const double u = t / p.tau;
  return p.alpha_f * (1.0 - std::exp(-u * u));
}

double pulse_amplitude(const PulseSpec& p, double t) {
  if (t < 0.0) throw std::invalid_argument("pulse_amplitude: t must be non-negative");
  const double g = std::exp(-(t / p.tau) * (t / p.tau));
  return 4.0 * t * p.alpha_f / (p.tau * p.tau) * g + kappa_angular(p) * p.alpha_f * (1.0 - g);
}

double dressed_resonator_frequency(const ReadoutModel& model) {
  if (model.kind == ReadoutModelKind::Reduced) return model.omega_r;
  const FullSetup s = full_setup(model);
  double sum = 0.0;
  for (int j = 0; j < 2; ++j) sum += s.table.branches[j][1].energy - s.table.branches[j][0].energy;
  return 0.5 * sum;
}

TrajectoryRecord sse_trajectory(const ReadoutModel& model, const PulseSpec& p, const SseOptions& options,
                                std::uint64_t seed, int qubit_init) {
  p.validate();
  const Engine e = make_engine(model, p, options.dt, qubit_init);
  TrajectoryRecord rec;
  rec.qubit_init = qubit_init;
  rec.seed = seed;
  rec.model_tag = model.tag();
  std::mt19937_64 rng(seed);
  run(e, p, options, options.noise ? &rng : nullptr, rec.max_norm_correction,
      [&](long, double t, cplx dj, cplx) {
        rec.times.push_back(t);
        rec.x_record.push_back(dj.real() / options.dt);
        rec.p_record.push_back(dj.imag() / options.dt);
      });
  return rec;
}

std::vector<cplx> reference_response(const ReadoutModel& model, const PulseSpec& p, const SseOptions& options,
                                     int qubit_init) {
  p.validate();
  const long steps = std::lround(options.t_end / options.dt);
  std::vector<cplx> out;
  out.reserve(steps);
  if (model.kind == ReadoutModelKind::Reduced) {
    const double s = qubit_sign(qubit_init);
    const double w = kTwoPi * (model.omega_r - drive_frequency(model, p) + s * model.chi_z);
    const double kappa = kappa_angular(p);
    auto f = [&](double t, cplx a) { return cplx(-0.5 * kappa, -w) * a + 0.5 * pulse_amplitude(p, t); };
    constexpr int sub = 8;
    const double h = options.dt / sub;
    cplx a = 0.0;
    for (long k = 0; k < steps; ++k) {
      out.push_back(a);
      for (int i = 0; i < sub; ++i) {
        const double t = k * options.dt + i * h;
        const cplx k1 = f(t, a);
        const cplx k2 = f(t + 0.5 * h, a + 0.5 * h * k1);
        const cplx k3 = f(t + 0.5 * h, a + 0.5 * h * k2);
        const cplx k4 = f(t + h, a + h * k3);
        a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    return out;
  }
  const Engine e = make_engine(model, p, options.dt, qubit_init);
  double corr = 0.0;
  run(e, p, options, nullptr, corr, [&](long, double t, cplx, cplx ea) {
    out.push_back(ea * std::polar(1.0, kTwoPi * e.omega_d * t));
  });
  return out;
}

Eigen::VectorXd full_model_branch_populations(const ReadoutModel& model, const PulseSpec& p,
                                              const SseOptions& options, int qubit_init) {
  if (model.kind != ReadoutModelKind::Full) throw std::invalid_argument("branch populations need the full model");
  p.validate();
  const Engine e = make_engine(model, p, options.dt, qubit_init);
  double corr = 0.0;
  const Eigen::VectorXcd psi = run(e, p, options, nullptr, corr, [](long, double, cplx, cplx) {});
  const FullSetup s = full_setup(model);
  Eigen::VectorXd pops = Eigen::VectorXd::Zero(s.table.k_levels);
  for (int j = 0; j < s.table.k_levels; ++j)
    for (const Rung& r : s.table.branches[j]) pops(j) += std::norm(s.eig.vector(r.eigen_index).dot(psi));
  return pops;
}

FilterWeights matched_filter(const ReadoutModel& model, const PulseSpec& p, const SseOptions& options) {
  const auto ag = reference_response(model, p, options, 0);
  const auto ae = reference_response(model, p, options, 1);
  FilterWeights w;
  for (std::size_t k = 0; k < ag.size(); ++k) {
    w.times.push_back(k * options.dt);
    const cplx d = ae[k] - ag[k];
    w.re.push_back(d.real());
    w.im.push_back(d.imag());
  }
  return w;
}

double integrate_record(const TrajectoryRecord& rec, const FilterWeights& w, double dt, double tau) {
  double s = 0.0;
  for (std::size_t k = 0; k < rec.x_record.size() && k < w.re.size(); ++k) {
    if (rec.times[k] + dt > tau + 1e-9 * dt) break;
    s += (w.re[k] * rec.x_record[k] + w.im[k] * rec.p_record[k]) * dt;
  }
  return s;
}

std::pair<double, double> wilson_interval(int k, int n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double ph = static_cast<double>(k) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (ph + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::uint64_t trajectory_seed(std::uint64_t seed, int index, int qubit) {
  return stream_seed(seed, 2ULL * static_cast<std::uint64_t>(index) + static_cast<std::uint64_t>(qubit));
}

ErrorCurve assignment_error(const EnsembleSpec& spec) {
  if (spec.n_traj < 100) throw std::invalid_argument("assignment_error: n_traj per state must be >= 100");
  if (spec.tau_grid.empty()) throw std::invalid_argument("assignment_error: empty tau grid");
  spec.pulse.validate();
  SseOptions sse = spec.sse;
  double tau_max = 0.0;
  for (double t : spec.tau_grid) tau_max = std::max(tau_max, t);
  sse.t_end = std::max(sse.t_end, tau_max);

  const FilterWeights w = matched_filter(spec.model, spec.pulse, sse);
  const int nt = static_cast<int>(spec.tau_grid.size());
  const int n = spec.n_traj;
  // signal[(qubit * n + i) * nt + k]
  std::vector<double> signal(static_cast<std::size_t>(2) * n * nt, 0.0);

  parallel_for(static_cast<std::size_t>(2) * n, spec.workers, [&](std::size_t idx) {
    const int qubit = static_cast<int>(idx) / n;
    const int i = static_cast<int>(idx) % n;
    const TrajectoryRecord rec =
        sse_trajectory(spec.model, spec.pulse, sse, trajectory_seed(spec.seed, i, qubit), qubit);
    for (int k = 0; k < nt; ++k) signal[idx * nt + k] = integrate_record(rec, w, sse.dt, spec.tau_grid[k]);
  });

  const double kappa = kappa_angular(spec.pulse);
  ErrorCurve curve;
  for (int k = 0; k < nt; ++k) {
    ErrorPoint pt;
    pt.tau = spec.tau_grid[k];
    pt.n_traj = n;
    double sg = 0.0, se = 0.0;
    for (int i = 0; i < n; ++i) {
      sg += signal[(static_cast<std::size_t>(i)) * nt + k];
      se += signal[(static_cast<std::size_t>(n + i)) * nt + k];
    }
    pt.mean_g = sg / n;
    pt.mean_e = se / n;
    double vg = 0.0, ve = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = signal[static_cast<std::size_t>(i) * nt + k] - pt.mean_g;
      const double b = signal[static_cast<std::size_t>(n + i) * nt + k] - pt.mean_e;
      vg += a * a;
      ve += b * b;
    }
    const double pooled = std::sqrt(0.5 * (vg + ve) / (n - 1));
    const double sep = pt.mean_e - pt.mean_g;
    pt.threshold = 0.5 * (pt.mean_g + pt.mean_e);
    pt.degenerate = !(std::abs(sep) > 1e-12 * std::max(1.0, pooled));
    if (pt.degenerate)
      curve.warnings.push_back(fmt::format("class means coincide at tau = {} ns; threshold is degenerate", pt.tau));
    const double dir = sep >= 0.0 ? 1.0 : -1.0;
    int wrong = 0;
    for (int i = 0; i < n; ++i) {
      if (dir * (signal[static_cast<std::size_t>(i) * nt + k] - pt.threshold) > 0.0) ++wrong;
      if (!(dir * (signal[static_cast<std::size_t>(n + i) * nt + k] - pt.threshold) > 0.0)) ++wrong;
    }
    pt.error = static_cast<double>(wrong) / (2.0 * n);
    std::tie(pt.ci_low, pt.ci_high) = wilson_interval(wrong, 2 * n);
    pt.snr_empirical = pooled > 0.0 ? std::abs(sep) / (std::sqrt(2.0) * pooled) : 0.0;
    double acc = 0.0;
    for (std::size_t b = 0; b < w.re.size(); ++b) {
      if (w.times[b] + sse.dt > pt.tau + 1e-9 * sse.dt) break;
      acc += (w.re[b] * w.re[b] + w.im[b] * w.im[b]) * sse.dt;
    }
    pt.snr_gaussian = std::sqrt(kappa * acc);
    pt.predicted_error = 0.5 * std::erfc(0.5 * pt.snr_gaussian);
    curve.points.push_back(pt);
  }
  return curve;
}

}  // namespace lro
