#include <doctest.h>

#include <cmath>

#include "lro/classical.hpp"
#include "lro/errors.hpp"

using namespace lro;

namespace {

constexpr double kPi = 3.14159265358979323846;

PendulumParams driven(DriveKind kind, double amp) {
  PendulumParams p;
  p.z = std::sqrt(8.0 / 110.0);
  p.drive = kind;
  p.amplitude = amp;
  p.omega_d_tilde = 1.38;
  return p;
}

PhasePoint rk4_reference(const PendulumParams& p, PhasePoint s, double t_end, long steps) {
  const double h = t_end / steps;
  for (long k = 0; k < steps; ++k) s = pendulum_step_rk4(p, s, k * h, h);
  return s;
}

}  // namespace

TEST_SUITE("classical") {
  TEST_CASE("angle wrapping") {
    CHECK(wrap_angle(0.3) == doctest::Approx(0.3));
    CHECK(wrap_angle(2 * kPi + 0.3) == doctest::Approx(0.3));
    CHECK(wrap_angle(-kPi - 0.1) == doctest::Approx(kPi - 0.1));
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  }

  TEST_CASE("symplectic steps converge to the RK4 reference with the expected order") {
    for (auto kind : {DriveKind::Charge, DriveKind::Parametric}) {
      auto p = driven(kind, 0.2);
      PhasePoint s0{0.8, 0.3};
      const double t_end = 3 * p.period();
      auto ref = rk4_reference(p, s0, t_end, 200000);
      auto err = [&](Integrator in, long steps) {
        auto s = integrate(p, s0, 0.0, t_end / steps, steps, in);
        return std::hypot(s.phi - ref.phi, s.n - ref.n);
      };
      const double l1 = err(Integrator::Leapfrog, 400), l2 = err(Integrator::Leapfrog, 800);
      const double y1 = err(Integrator::Yoshida4, 200), y2 = err(Integrator::Yoshida4, 400);
      CHECK(std::log2(l1 / l2) == doctest::Approx(2.0).epsilon(0.1));
      CHECK(std::log2(y1 / y2) == doctest::Approx(4.0).epsilon(0.15));
    }
  }

  TEST_CASE("undriven energy is conserved") {
    PendulumParams p = driven(DriveKind::None, 0.0);
    PhasePoint s{1.2, 0.0};
    const double e0 = pendulum_energy(s);
    const int spp = 500;
    auto end = integrate(p, s, 0.0, p.period() / spp, 100L * spp);
    CHECK(std::abs(pendulum_energy(end) - e0) < 1e-8);
  }

  TEST_CASE("zero amplitude drive reproduces the undriven motion") {
    auto p0 = driven(DriveKind::None, 0.0);
    auto pc = driven(DriveKind::Charge, 0.0);
    PhasePoint s{0.5, 0.1};
    auto a = integrate(p0, s, 0.0, 0.01, 1000);
    auto b = integrate(pc, s, 0.0, 0.01, 1000);
    CHECK(a.phi == b.phi);
    CHECK(a.n == b.n);
    CHECK(trajectory_deviation(pc, s) == doctest::Approx(0.0).scale(1e-12));
  }

  TEST_CASE("orbit areas, quadrature against elliptic integrals") {
    for (double h : {-0.99, -0.5, 0.0, 0.5, 0.9, 0.999}) CHECK(orbit_area(h) == doctest::Approx(orbit_area_elliptic(h)).epsilon(1e-10));
    CHECK(separatrix_area() == doctest::Approx(16.0).epsilon(1e-12));
    // small oscillations: area 2 pi (h + 1), period 2 pi
    CHECK(orbit_area(-1 + 1e-6) == doctest::Approx(2 * kPi * 1e-6).epsilon(1e-4));
    CHECK(orbit_period(-1 + 1e-8) == doctest::Approx(2 * kPi).epsilon(1e-6));
    CHECK(energy_for_area(orbit_area(0.3)) == doctest::Approx(0.3).epsilon(1e-10));
    CHECK_THROWS_AS(energy_for_area(16.5), UnboundStateError);
  }

  TEST_CASE("numerical period of a libration orbit") {
    PendulumParams p = driven(DriveKind::None, 0.0);
    const double h = 0.2;
    PhasePoint s{0.0, std::sqrt(2 * (h + 1))};
    const double period = orbit_period(h);
    const long steps = 20000;
    auto end = integrate(p, s, 0.0, period / steps, steps);
    CHECK(end.phi == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
    CHECK(end.n == doctest::Approx(s.n).epsilon(1e-8));
  }

  TEST_CASE("separatrix curve lies on the unit energy shell") {
    for (const auto& pt : separatrix_curve(101)) CHECK(pendulum_energy(pt) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("Bohr-Sommerfeld orbits") {
    const double z = std::sqrt(8.0 / 110.0);
    CHECK(bohr_sommerfeld_count(z) == 9);
    auto o = bohr_sommerfeld_orbit(3, z, 200);
    CHECK(o.area == doctest::Approx(2 * kPi * z * 3.5));
    CHECK(orbit_area(o.energy) == doctest::Approx(o.area).epsilon(1e-10));
    for (const auto& pt : o.points) CHECK(pendulum_energy(pt) == doctest::Approx(o.energy).epsilon(1e-9));
    CHECK_THROWS_AS(bohr_sommerfeld_orbit(9, z), UnboundStateError);
  }

  TEST_CASE("sampled initial conditions lie in the action window") {
    const double z = 0.27;
    for (double u : {0.0, 0.25, 0.5, 0.999}) {
      auto s = sample_initial_condition(z, u, 0.37);
      const double area = orbit_area(pendulum_energy(s));
      CHECK(area >= kPi * z * (1 - 1e-9));
      CHECK(area <= 4 * kPi * z * (1 + 1e-9));
    }
  }

  TEST_CASE("calibration helpers") {
    CHECK(photon_amplitude(DriveKind::Parametric, 49, 0.09, 0.15) == doctest::Approx(0.63));
    CHECK(photon_amplitude(DriveKind::Charge, 49, 0.09, 0.15) == doctest::Approx(1.05));
    const double g = coupling_from_dispersive_shift(-0.0128, -2.64, 0.215);
    CHECK(g * g * 0.215 / (2.64 * (2.64 + 0.215)) == doctest::Approx(0.0128));
  }

  TEST_CASE("average deviation is independent of the worker count") {
    auto p = driven(DriveKind::Charge, 0.4);
    AverageDeviationOptions o;
    o.n_samples = 12;
    o.deviation.n_periods = 10;
    o.deviation.steps_per_period = 200;
    o.seed = 5;
    o.workers = 1;
    auto a = average_deviation(p, o);
    o.workers = 3;
    auto b = average_deviation(p, o);
    CHECK(a.per_sample == b.per_sample);
    CHECK(a.mean == b.mean);
  }
}
