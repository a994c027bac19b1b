#include <doctest.h>

#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "lro/circuit.hpp"
#include "lro/schrieffer_wolff.hpp"
#include "lro/spectral.hpp"

using namespace lro;

namespace {

TransmonSpec transmon(double ratio, int k = 12) {
  TransmonSpec t;
  t.e_c = 0.215;
  t.e_j = ratio * 0.215;
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

}  // namespace

TEST_SUITE("schrieffer_wolff") {
  TEST_CASE("diagonal shift is independent of the resonator frequency") {
    auto t = transmon(110);
    auto a = sw_diagonal(t, resonator(8.8, 0.0896, 30));
    auto b = sw_diagonal(t, resonator(10.5, 0.0896, 30));
    CHECK(std::abs(a.chi_z0 - b.chi_z0) < 1e-12);
    auto basis = transmon_eigensystem(t);
    CHECK(a.chi_z0 == doctest::Approx(dispersive_shift_exact(t.e_j, basis, 0.0896)).epsilon(1e-12));
    CHECK(std::isnan(a.chi_exact(0, 0)));
    // chi_exact(j, 1) - chi_exact(0, 1) relation at m = 1
    CHECK((a.chi_exact(1, 1) - a.chi_exact(0, 1)) / 2 == doctest::Approx(a.chi_z0).epsilon(1e-12));
    CHECK(a.lamb(0) == doctest::Approx(t.e_j * basis.cos_phi(0, 0)));
  }

  TEST_CASE("phi for a target dispersive shift") {
    auto t = transmon(50);
    t.e_c = 0.214867;
    t.e_j = 50 * t.e_c;
    const double phi = phi_rzpf_for_chi(t, -0.00866);
    CHECK(phi == doctest::Approx(0.0898109).epsilon(1e-5));
    CHECK(dispersive_shift_exact(t.e_j, transmon_eigensystem(t), phi) == doctest::Approx(-0.00866).epsilon(1e-10));
    CHECK_THROWS(phi_rzpf_for_chi(t, 0.01));
  }

  TEST_CASE("coupling elements equal the assembled off-diagonal matrix elements") {
    auto t = transmon(80, 6);
    auto r = resonator(7.3, 0.12, 12);
    auto eta = sw_eta(t, r);
    auto h = assemble_hamiltonian(t, r);
    const int n = r.n_fock;
    double worst = 0.0;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            if (a == b && c == d) continue;
            worst = std::max(worst, std::abs(h.matrix(a * n + c, b * n + d).real() - eta.at(a, b, c, d)));
          }
    CHECK(worst < 1e-12);
    CHECK(eta.at(0, 0, 2, 0) != 0.0);
    CHECK(std::abs(eta.at(0, 1, 2, 0)) < 1e-12);  // odd transmon parity
    CHECK(std::abs(eta.at(0, 2, 3, 0)) < 1e-12);  // odd photon change
  }

  TEST_CASE("second-order energies against exact diagonalization at weak coupling") {
    auto t = transmon(110, 12);
    auto r = resonator(8.8, 0.03, 40);
    SwOptions o;
    o.m_max = 5;
    auto sw = sw_second_order(t, r, o);
    auto bt = label_branches(diagonalize(assemble_hamiltonian(t, r)));
    for (int i = 0; i < 2; ++i)
      for (int m = 0; m <= 5; ++m) CHECK(std::abs(sw.energy2(i, m) - bt.branches[i][m].energy) < 1e-6);
  }

  TEST_CASE("second order rejects an asymmetric junction") {
    auto t = transmon(110, 8);
    t.d = 0.02;
    CHECK_THROWS_AS(sw_second_order(t, resonator(8.8, 0.09, 20)), std::invalid_argument);
  }

  TEST_CASE("near resonance between levels 1 and 5 is reported") {
    auto t = transmon(50, 10);
    const double phi = 0.09;
    const int m = 6;
    auto mismatch = [&](double omega) {
      auto dm = sw_diagonal(t, resonator(omega, phi, 20));
      return dm.diag_energy(1, m) - dm.diag_energy(5, m - 2);
    };
    auto basis = transmon_eigensystem(t);
    const double guess = (basis.energies(5) - basis.energies(1)) / 2;
    boost::uintmax_t iters = 100;
    auto root = boost::math::tools::toms748_solve(mismatch, guess - 1.0, guess + 1.0,
                                                  boost::math::tools::eps_tolerance<double>(50), iters);
    const double omega = 0.5 * (root.first + root.second);
    SwOptions o;
    o.m_max = m;
    try {
      sw_second_order(t, resonator(omega, phi, 20), o);
      FAIL("expected a near-resonance error");
    } catch (const NearResonanceError& e) {
      CHECK(std::min(e.level_i, e.level_k) == 1);
      CHECK(std::max(e.level_i, e.level_k) == 5);
      CHECK(std::abs(e.photons_i - e.photons_k) == 2);
      CHECK(std::abs(e.denominator) < 1e-3);
    }
  }
}
