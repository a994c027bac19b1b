#include "lro/classical.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "lro/errors.hpp"
#include "lro/linalg.hpp"

namespace lro {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeparatrixArea = 16.0;

double potential_scale(const PendulumParams& p, double t) {
  if (p.drive != DriveKind::Parametric) return 1.0;
  return std::cos(2.0 * p.amplitude * std::cos(p.omega_d_tilde * t));
}

double drive_velocity(const PendulumParams& p, double t) {
  return p.drive == DriveKind::Charge ? p.amplitude * std::cos(p.omega_d_tilde * t) : 0.0;
}

PhasePoint leapfrog(const PendulumParams& p, PhasePoint s, double t, double h) {
  s.n -= 0.5 * h * potential_scale(p, t) * std::sin(s.phi);
  s.phi += h * s.n;
  if (p.drive == DriveKind::Charge && p.amplitude != 0.0) {
    const double w = p.omega_d_tilde;
    s.phi += p.amplitude / w * (std::sin(w * (t + h)) - std::sin(w * t));
  }
  s.n -= 0.5 * h * potential_scale(p, t + h) * std::sin(s.phi);
  return s;
}

}  // namespace

double PendulumParams::period() const { return 2.0 * kPi / omega_d_tilde; }

void PendulumParams::validate() const {
  if (!(z > 0.0)) throw std::invalid_argument(fmt::format("pendulum: z must be positive (got {})", z));
  if (!(amplitude >= 0.0)) throw std::invalid_argument("pendulum: amplitude must be non-negative");
  if (!(omega_d_tilde > 0.0)) throw std::invalid_argument("pendulum: omega_d_tilde must be positive");
}

double wrap_angle(double phi) {
  double w = std::remainder(phi, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double pendulum_energy(const PhasePoint& s) { return 0.5 * s.n * s.n - std::cos(s.phi); }

double pendulum_hamiltonian(const PendulumParams& p, const PhasePoint& s, double t) {
  return 0.5 * s.n * s.n + drive_velocity(p, t) * s.n - potential_scale(p, t) * std::cos(s.phi);
}

PhasePoint pendulum_step(const PendulumParams& p, const PhasePoint& s, double t, double dt,
                         Integrator integrator) {
  if (integrator == Integrator::Leapfrog) return leapfrog(p, s, t, dt);
  static const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  static const double w0 = 1.0 - 2.0 * w1;
  PhasePoint x = leapfrog(p, s, t, w1 * dt);
  x = leapfrog(p, x, t + w1 * dt, w0 * dt);
  return leapfrog(p, x, t + (w1 + w0) * dt, w1 * dt);
}

PhasePoint pendulum_step_rk4(const PendulumParams& p, const PhasePoint& s, double t, double dt) {
  auto f = [&](const PhasePoint& x, double tt) {
    return PhasePoint{x.n + drive_velocity(p, tt), -potential_scale(p, tt) * std::sin(x.phi)};
  };
  auto add = [](const PhasePoint& a, const PhasePoint& b, double c) {
    return PhasePoint{a.phi + c * b.phi, a.n + c * b.n};
  };
  const PhasePoint k1 = f(s, t);
  const PhasePoint k2 = f(add(s, k1, 0.5 * dt), t + 0.5 * dt);
  const PhasePoint k3 = f(add(s, k2, 0.5 * dt), t + 0.5 * dt);
  const PhasePoint k4 = f(add(s, k3, dt), t + dt);
  return {s.phi + dt / 6.0 * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi),
          s.n + dt / 6.0 * (k1.n + 2 * k2.n + 2 * k3.n + k4.n)};
}

PhasePoint integrate(const PendulumParams& p, PhasePoint s, double t0, double dt, long steps,
                     Integrator integrator) {
  for (long k = 0; k < steps; ++k) s = pendulum_step(p, s, t0 + k * dt, dt, integrator);
  return s;
}

SectionData poincare_section(const PendulumParams& p, const std::vector<PhasePoint>& initial,
                             const SectionOptions& options) {
  p.validate();
  if (options.steps_per_period < 200)
    throw std::invalid_argument("poincare_section: at least 200 steps per drive period required");
  SectionData out;
  out.initial = initial;
  out.points.assign(initial.size(), {});
  const double period = p.period();
  const double dt = period / options.steps_per_period;
  parallel_for(initial.size(), options.workers, [&](std::size_t i) {
    auto& pts = out.points[i];
    pts.reserve(options.n_periods);
    PhasePoint s = initial[i];
    for (int k = 0; k < options.n_periods; ++k) {
      const double t0 = k * period;
      for (int j = 0; j < options.steps_per_period; ++j)
        s = pendulum_step(p, s, t0 + j * dt, dt, options.integrator);
      pts.push_back({wrap_angle(s.phi), s.n});
    }
  });
  return out;
}

std::vector<PhasePoint> separatrix_curve(int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("separatrix_curve: need at least 2 samples");
  std::vector<PhasePoint> out;
  out.reserve(2 * n_samples);
  for (int sign : {1, -1}) {
    for (int i = 0; i < n_samples; ++i) {
      const double phi = -kPi + 2.0 * kPi * i / (n_samples - 1);
      out.push_back({phi, sign * 2.0 * std::cos(0.5 * phi)});
    }
  }
  return out;
}

double orbit_area(double h) {
  if (h <= -1.0) return 0.0;
  const double phi_max = h >= 1.0 ? kPi : std::acos(-h);
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double half = integrator.integrate(
      [h](double phi) { return std::sqrt(std::max(0.0, 2.0 * (h + std::cos(phi)))); }, 0.0, phi_max);
  return 4.0 * half;
}

double orbit_area_elliptic(double h) {
  if (h <= -1.0) return 0.0;
  if (h >= 1.0) return kSeparatrixArea;
  const double k = std::sqrt(0.5 * (1.0 + h));
  return 16.0 * (boost::math::ellint_2(k) - (1.0 - k * k) * boost::math::ellint_1(k));
}

double orbit_period(double h) {
  if (h <= -1.0) return 2.0 * kPi;
  if (h >= 1.0) throw UnboundStateError("orbit_period: the separatrix has infinite period");
  return 4.0 * boost::math::ellint_1(std::sqrt(0.5 * (1.0 + h)));
}

double separatrix_area() { return orbit_area(1.0); }

double energy_for_area(double area) {
  if (!(area > 0.0)) throw std::invalid_argument("energy_for_area: area must be positive");
  if (area >= kSeparatrixArea)
    throw UnboundStateError(fmt::format("area {:.6f} is not enclosed by the separatrix (16)", area));
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve([area](double h) { return orbit_area(h) - area; }, -1.0, 1.0,
                                                   -area, kSeparatrixArea - area,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

BohrSommerfeldOrbit bohr_sommerfeld_orbit(int j, double z, int n_points) {
  if (j < 0) throw std::invalid_argument("bohr_sommerfeld_orbit: level must be non-negative");
  if (!(z > 0.0)) throw std::invalid_argument("bohr_sommerfeld_orbit: z must be positive");
  const double area = 2.0 * kPi * z * (j + 0.5);
  if (area >= kSeparatrixArea)
    throw UnboundStateError(
        fmt::format("Bohr-Sommerfeld level {} encloses {:.4f} >= 16 and lies outside the well", j, area));
  BohrSommerfeldOrbit orbit;
  orbit.level = j;
  orbit.area = area;
  orbit.energy = energy_for_area(area);
  const double phi_max = std::acos(-orbit.energy);
  const int m = std::max(2, n_points / 2);
  for (int sign : {1, -1}) {
    for (int i = 0; i < m; ++i) {
      const double u = sign > 0 ? static_cast<double>(i) / (m - 1) : 1.0 - static_cast<double>(i) / (m - 1);
      const double phi = -phi_max + 2.0 * phi_max * u;
      orbit.points.push_back({phi, sign * std::sqrt(std::max(0.0, 2.0 * (orbit.energy + std::cos(phi))))});
    }
  }
  return orbit;
}

int bohr_sommerfeld_count(double z) {
  if (!(z > 0.0)) throw std::invalid_argument("bohr_sommerfeld_count: z must be positive");
  return static_cast<int>(std::floor(separatrix_area() / (2.0 * kPi * z)));
}

double trajectory_deviation(const PendulumParams& p, const PhasePoint& ic, const DeviationOptions& options) {
  p.validate();
  if (p.amplitude == 0.0 || p.drive == DriveKind::None) return 0.0;
  PendulumParams free = p;
  free.amplitude = 0.0;
  const double period = p.period();
  const double dt = period / options.steps_per_period;
  PhasePoint a = ic;
  PhasePoint b = ic;
  double sum = 0.0;
  for (int k = 0; k < options.n_periods; ++k) {
    const double t0 = k * period;
    for (int j = 0; j < options.steps_per_period; ++j) {
      a = pendulum_step(free, a, t0 + j * dt, dt, options.integrator);
      b = pendulum_step(p, b, t0 + j * dt, dt, options.integrator);
    }
    sum += std::hypot(a.phi - b.phi, a.n - b.n);
  }
  return sum;
}

PhasePoint sample_initial_condition(double z, double u_action, double u_phase) {
  const double area = kPi * z * (1.0 + 3.0 * u_action);
  const double h = energy_for_area(area);
  const PhasePoint start{0.0, std::sqrt(2.0 * (h + 1.0))};
  const double duration = u_phase * orbit_period(h);
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(duration / 0.01)));
  PendulumParams free;
  free.z = z;
  return integrate(free, start, 0.0, duration / steps, steps);
}

DeviationStats average_deviation(const PendulumParams& p, const AverageDeviationOptions& options) {
  if (options.n_samples < 1) throw std::invalid_argument("average_deviation: n_samples must be >= 1");
  DeviationStats stats;
  stats.per_sample.assign(options.n_samples, 0.0);
  parallel_for(options.n_samples, options.workers, [&](std::size_t i) {
    std::mt19937_64 rng(stream_seed(options.seed, i));
    const double u1 = unit_uniform(rng());
    const double u2 = unit_uniform(rng());
    const PhasePoint ic = sample_initial_condition(p.z, u1, u2);
    stats.per_sample[i] = trajectory_deviation(p, ic, options.deviation) / options.deviation.n_periods;
  });
  double sum = 0.0;
  for (double v : stats.per_sample) sum += v;
  stats.mean = sum / options.n_samples;
  if (options.n_samples > 1) {
    double ss = 0.0;
    for (double v : stats.per_sample) ss += (v - stats.mean) * (v - stats.mean);
    stats.std_error = std::sqrt(ss / (options.n_samples - 1) / options.n_samples);
  }
  return stats;
}

double photon_amplitude(DriveKind kind, double n_bar, double phi_rzpf, double charge_cal) {
  if (n_bar < 0.0) throw std::invalid_argument("photon_amplitude: n_bar must be non-negative");
  switch (kind) {
    case DriveKind::Parametric: return phi_rzpf * std::sqrt(n_bar);
    case DriveKind::Charge: return charge_cal * std::sqrt(n_bar);
    case DriveKind::None: return 0.0;
  }
  return 0.0;
}

double charge_calibration(double g, double e_j, double e_c) {
  const double z = std::sqrt(8.0 * e_c / e_j);
  const double n_zpf = std::pow(e_j / (32.0 * e_c), 0.25);
  return 2.0 * g / (n_zpf * z * e_j);
}

double coupling_from_dispersive_shift(double chi, double delta, double e_c) {
  const double ad = std::abs(delta);
  return std::sqrt(std::abs(chi) * ad * (ad + e_c) / e_c);
}

}  // namespace lro
