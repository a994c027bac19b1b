#pragma once

// Readout simulation: pulse shaping, heterodyne stochastic Schrodinger
// trajectories of the reduced (two-level x Fock) or full cosine model,
// matched filtering and assignment-error estimation.
//
// Frequencies in GHz (nu = omega / 2pi), times in ns. Drive amplitudes
// epsilon(t) are angular (rad/ns), matching d alpha/dt = -(kappa/2) alpha + epsilon/2
// with kappa converted to rad/ns.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lro/circuit.hpp"
#include "lro/linalg.hpp"

namespace lro {

struct PulseSpec {
  double alpha_f = 2.0;
  double tau = 10.0;     // ns
  double omega_d = 0.0;  // GHz; 0 selects the model's resonator frequency
  double kappa = 0.017;  // GHz (kappa / 2pi)
  void validate() const;
};

/// alpha_p(t) = alpha_f (1 - exp(-(t/tau)^2)).
double cavity_response(const PulseSpec& p, double t);

/// epsilon(t) = (4 t alpha_f / tau^2) e^{-(t/tau)^2} + kappa alpha_f (1 - e^{-(t/tau)^2}),
/// kappa in rad/ns.
double pulse_amplitude(const PulseSpec& p, double t);

enum class ReadoutModelKind { Reduced, Full };

struct ReadoutModel {
  ReadoutModelKind kind = ReadoutModelKind::Reduced;
  // reduced model
  double chi_z = -0.00866;  // GHz
  double omega_r = 9.3;     // GHz, bare resonator frequency of the reduced model
  int n_fock = 40;
  // full model (lab frame)
  TransmonSpec transmon;
  ResonatorSpec resonator;
  std::string tag() const { return kind == ReadoutModelKind::Reduced ? "reduced" : "full"; }
};

struct TrajectoryRecord {
  std::vector<double> times;  // start of each bin, ns
  std::vector<double> x_record;
  std::vector<double> p_record;
  int qubit_init = 0;
  std::uint64_t seed = 0;
  std::string model_tag;
  double max_norm_correction = 0.0;
};

struct SseOptions {
  double dt = 0.02;                // ns
  double t_end = 50.0;             // ns
  double max_norm_correction = 0.1;
  bool noise = true;
};

/// Drive frequency used by the full model when PulseSpec::omega_d is 0: the
/// dressed resonator frequency averaged over the two qubit branches.
double dressed_resonator_frequency(const ReadoutModel& model);

/// One heterodyne trajectory. The record of bin k is dJ_k / dt with
/// dJ = sqrt(kappa) <a> dt + dZ, dZ = (dW1 + i dW2) / sqrt(2), demodulated at
/// omega_d, split into x = Re and p = Im. The state follows the normalized
/// heterodyne equation by Euler-Maruyama with renormalization every step. Throws NormDivergenceError when a step changes the norm by
/// more than the allowed fraction.
TrajectoryRecord sse_trajectory(const ReadoutModel& model, const PulseSpec& p, const SseOptions& options,
                                std::uint64_t seed, int qubit_init);

/// Noise-free reference: demodulated <a>(t_k) at the start of every bin.
/// Reduced model: the exact coherent-state equation
/// d alpha/dt = -i 2pi (omega_r - omega_d + s chi) alpha - (kappa/2) alpha + epsilon/2 by RK4.
/// Full model: the SSE with the noise increments set to zero.
std::vector<cplx> reference_response(const ReadoutModel& model, const PulseSpec& p, const SseOptions& options,
                                     int qubit_init);

/// Populations of the dressed branches (index = branch) after a noise-free
/// full-model evolution to options.t_end.
Eigen::VectorXd full_model_branch_populations(const ReadoutModel& model, const PulseSpec& p,
                                              const SseOptions& options, int qubit_init);

struct FilterWeights {
  std::vector<double> times;
  std::vector<double> re;  // Re(<a_e> - <a_g>)
  std::vector<double> im;  // Im(<a_e> - <a_g>)
};

FilterWeights matched_filter(const ReadoutModel& model, const PulseSpec& p, const SseOptions& options);

/// S(tau) = sum_{t_k + dt <= tau} (Re w_k x_k + Im w_k p_k) dt.
double integrate_record(const TrajectoryRecord& rec, const FilterWeights& w, double dt, double tau);

struct EnsembleSpec {
  ReadoutModel model;
  PulseSpec pulse;
  SseOptions sse;
  int n_traj = 2000;  // per qubit state
  std::vector<double> tau_grid{10, 20, 30, 40, 50};
  std::uint64_t seed = 1;
  int workers = 1;
};

struct ErrorPoint {
  double tau = 0.0;
  double error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_traj = 0;              // per qubit state
  double threshold = 0.0;
  double mean_g = 0.0;
  double mean_e = 0.0;
  double snr_empirical = 0.0;  // |mean_e - mean_g| / pooled std
  double snr_gaussian = 0.0;   // sqrt(kappa int |w|^2 dt)
  double predicted_error = 0.0;  // erfc(snr_gaussian / 2) / 2
  bool degenerate = false;
};

struct ErrorCurve {
  std::vector<ErrorPoint> points;
  std::vector<std::string> warnings;
};

/// Wilson score interval for k successes out of n at z standard deviations.
std::pair<double, double> wilson_interval(int k, int n, double z = 1.959963984540054);

ErrorCurve assignment_error(const EnsembleSpec& spec);

/// Trajectory seeds: stream (seed, 2 i + qubit).
std::uint64_t trajectory_seed(std::uint64_t seed, int index, int qubit);

}  // namespace lro
