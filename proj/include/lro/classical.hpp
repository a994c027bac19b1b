#pragma once

// Classical driven pendulum: charge drive and parametric drive, symplectic
// integration, Poincare sections, Bohr-Sommerfeld orbits and the
// trajectory-deviation metric.
//
// Scaled variables: phi, n~ = z n, H~ = H / E_J, time t~ = omega_p t, in which
// the equations of motion are canonical, phi' = dH~/dn~, n~' = -dH~/dphi.

#include <cstdint>
#include <vector>

namespace lro {

enum class DriveKind { None, Charge, Parametric };

struct PendulumParams {
  double z = 0.26968;            // sqrt(8 E_C / E_J), the effective hbar
  DriveKind drive = DriveKind::None;
  double amplitude = 0.0;        // epsilon_t or epsilon_p
  double omega_d_tilde = 1.38;   // omega_d / omega_p
  double period() const;
  void validate() const;
};

struct PhasePoint {
  double phi = 0.0;
  double n = 0.0;
};

enum class Integrator { Leapfrog, Yoshida4 };

/// Wraps an angle into (-pi, pi].
double wrap_angle(double phi);

/// Undriven scaled energy n^2/2 - cos(phi).
double pendulum_energy(const PhasePoint& s);

/// Instantaneous scaled Hamiltonian including the drive term.
double pendulum_hamiltonian(const PendulumParams& p, const PhasePoint& s, double t);

/// One step of size dt from time t. Leapfrog is kick-drift-kick with time
/// advanced in the drift; Yoshida4 is its fourth-order symmetric composition.
/// phi is not wrapped.
PhasePoint pendulum_step(const PendulumParams& p, const PhasePoint& s, double t, double dt,
                         Integrator integrator = Integrator::Yoshida4);

/// Classical RK4 on the same equations of motion (reference integrator).
PhasePoint pendulum_step_rk4(const PendulumParams& p, const PhasePoint& s, double t, double dt);

/// Advances `steps` steps of size dt; returns the final point.
PhasePoint integrate(const PendulumParams& p, PhasePoint s, double t0, double dt, long steps,
                     Integrator integrator = Integrator::Yoshida4);

struct SectionOptions {
  int n_periods = 200;
  int steps_per_period = 500;
  Integrator integrator = Integrator::Yoshida4;
  int workers = 1;
};

/// Stroboscopic samples at t = k T for k = 1..n_periods, phi wrapped.
struct SectionData {
  std::vector<PhasePoint> initial;
  std::vector<std::vector<PhasePoint>> points;
};

SectionData poincare_section(const PendulumParams& p, const std::vector<PhasePoint>& initial,
                             const SectionOptions& options = {});

/// n = +-2 cos(phi/2); upper half first, then the lower half, phi uniform in
/// [-pi, pi].
std::vector<PhasePoint> separatrix_curve(int n_samples);

/// Area enclosed by the libration orbit of energy h in (-1, 1], by
/// tanh-sinh quadrature of 2 int sqrt(2 (h + cos phi)) dphi.
double orbit_area(double h);

/// Same area from the complete elliptic integrals, 16 [E(k) - (1 - k^2) K(k)],
/// k^2 = (1 + h) / 2.
double orbit_area_elliptic(double h);

/// Undriven libration period 4 K(k).
double orbit_period(double h);

double separatrix_area();

struct BohrSommerfeldOrbit {
  int level = 0;
  double energy = 0.0;
  double area = 0.0;
  std::vector<PhasePoint> points;  // closed curve, upper half then lower half
};

/// Energy whose orbit encloses `area`; throws UnboundStateError for area >= 16.
double energy_for_area(double area);

/// Orbit enclosing 2 pi z (j + 1/2). Throws UnboundStateError outside the well.
BohrSommerfeldOrbit bohr_sommerfeld_orbit(int j, double z, int n_points = 256);

/// floor(16 / (2 pi z)).
int bohr_sommerfeld_count(double z);

struct DeviationOptions {
  int n_periods = 50;
  int steps_per_period = 500;
  Integrator integrator = Integrator::Yoshida4;
};

/// Sum over drive periods k = 1..n_periods of the phase-space distance
/// between the driven and the undriven trajectory from the same point,
/// sampled once per period with phi unwrapped.
double trajectory_deviation(const PendulumParams& p, const PhasePoint& ic, const DeviationOptions& options = {});

/// Initial condition whose undriven action is uniform in [pi z, 4 pi z] and
/// whose orbit phase is uniform, from two uniforms in [0, 1).
PhasePoint sample_initial_condition(double z, double u_action, double u_phase);

struct AverageDeviationOptions {
  int n_samples = 200;
  std::uint64_t seed = 1;
  DeviationOptions deviation;
  int workers = 1;
};

struct DeviationStats {
  double mean = 0.0;        // mean over samples of (deviation / n_periods)
  double std_error = 0.0;
  std::vector<double> per_sample;
};

DeviationStats average_deviation(const PendulumParams& p, const AverageDeviationOptions& options = {});

/// Scaled drive amplitude equivalent to n_bar resonator photons:
/// parametric phi_rzpf sqrt(n_bar), charge c sqrt(n_bar).
double photon_amplitude(DriveKind kind, double n_bar, double phi_rzpf, double charge_calibration);

/// c = 2 g / (n_zpf z E_J) with n_zpf = (E_J / 32 E_C)^{1/4}: a resonator
/// coherent state sqrt(n_bar) coupled through g n / n_zpf (a + a^dag) drives the
/// scaled charge with amplitude c sqrt(n_bar).
double charge_calibration(double g, double e_j, double e_c);

/// Transverse coupling g reproducing a dispersive shift chi from the
/// two-level-plus-anharmonicity formula |chi| = g^2 E_C / (|Delta| (|Delta| + E_C)).
double coupling_from_dispersive_shift(double chi, double delta, double e_c);

}  // namespace lro
