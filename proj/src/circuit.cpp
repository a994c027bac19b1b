#include "lro/circuit.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "lro/errors.hpp"
#include "lro/schrieffer_wolff.hpp"

namespace lro {

namespace {

constexpr double kElectronCharge = 1.602176634e-19;  // C
constexpr double kPlanck = 6.62607015e-34;           // J s
constexpr double kFluxQuantum = kPlanck / (2 * kElectronCharge);
constexpr double kPi = 3.14159265358979323846;

double joules_to_ghz(double energy) { return energy / kPlanck * 1e-9; }

}  // namespace

double resonator_charging_energy(const CircuitElements& e) {
  const double c_total = (4.0 * e.c + 8.0 * e.c_r) * 1e-15;
  return joules_to_ghz(kElectronCharge * kElectronCharge / c_total);
}

double resonator_inductive_energy(const CircuitElements& e) {
  return joules_to_ghz(kFluxQuantum * kFluxQuantum / (kPi * kPi * e.l_r * 1e-9));
}

std::pair<TransmonSpec, ResonatorSpec> reduce_circuit(const CircuitElements& e) {
  if (!(e.c > 0 && e.c_r > 0 && e.l_r > 0 && e.e_j1 > 0 && e.e_j2 > 0))
    throw std::invalid_argument("reduce_circuit: all circuit elements must be strictly positive");

  TransmonSpec t;
  t.e_c = joules_to_ghz(kElectronCharge * kElectronCharge / (4.0 * e.c * 1e-15));
  t.e_j = e.e_j1 + e.e_j2;
  t.d = (e.e_j2 - e.e_j1) / t.e_j;

  const double e_cr = resonator_charging_energy(e);
  const double e_lr = resonator_inductive_energy(e);
  ResonatorSpec r;
  r.omega_r = std::sqrt(8.0 * e_cr * e_lr);
  r.phi_rzpf = std::pow(2.0 * e_cr / e_lr, 0.25);
  return {t, r};
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

JointHamiltonian assemble_hamiltonian(const TransmonSpec& t, const ResonatorSpec& r,
                                      const TransmonBasis& basis, const ResonatorOps& ops) {
  const int k = t.k_levels;
  const int n = r.n_fock;
  if (basis.levels() != k || ops.dim() != n) {
    throw DimensionMismatchError(fmt::format(
        "assemble_hamiltonian: operators are {}x{} but specs ask for K={} N={}", basis.levels(),
        ops.dim(), k, n));
  }

  JointHamiltonian h;
  h.k_levels = k;
  h.n_fock = n;
  h.transmon = t;
  h.resonator = r;
  h.basis = basis;

  const Eigen::Index dim = static_cast<Eigen::Index>(k) * n;
  h.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      auto block = h.matrix.block(i * n, j * n, n, n);
      block = (2.0 * t.e_j * basis.cos_phi(i, j)) * ops.sin_sq_half.cast<cplx>();
      if (t.d != 0.0) block -= (t.d * t.e_j * basis.sin_phi(i, j)) * ops.sin_phi_r.cast<cplx>();
    }
  }
  for (int j = 0; j < k; ++j)
    for (int m = 0; m < n; ++m) h.matrix(j * n + m, j * n + m) += basis.energies(j) + m * r.omega_r;

  // Remove rounding asymmetry so downstream Hermitian solvers see exact symmetry.
  for (Eigen::Index b = 0; b < dim; ++b) {
    h.matrix(b, b) = h.matrix(b, b).real();
    for (Eigen::Index a = 0; a < b; ++a) {
      const cplx avg = 0.5 * (h.matrix(a, b) + std::conj(h.matrix(b, a)));
      h.matrix(a, b) = avg;
      h.matrix(b, a) = std::conj(avg);
    }
  }
  return h;
}

JointHamiltonian assemble_hamiltonian(const TransmonSpec& t, const ResonatorSpec& r) {
  return assemble_hamiltonian(t, r, transmon_eigensystem(t), resonator_operators(r));
}

DerivedQubitParams derived_params(const TransmonSpec& t, const ResonatorSpec& r) {
  t.validate();
  r.validate();
  TransmonSpec probe = t;
  probe.k_levels = std::max(2, t.k_levels);
  const TransmonBasis basis = transmon_eigensystem(probe);

  DerivedQubitParams p;
  p.omega_p = std::sqrt(8.0 * t.e_j * t.e_c);
  p.omega_q = basis.energies(1) - basis.energies(0);
  p.z = std::sqrt(8.0 * t.e_c / t.e_j);
  p.delta = p.omega_q - r.omega_r;
  p.chi_z_pert = -p.omega_p * r.phi_rzpf * r.phi_rzpf / 4.0;
  p.chi_z_exact = dispersive_shift_exact(t.e_j, basis, r.phi_rzpf);
  return p;
}

ReducedModel build_reduced_model(double chi_z, double omega_r, double omega_q, double kappa) {
  if (chi_z > 0) throw std::invalid_argument("build_reduced_model: chi_z must be <= 0");
  if (!(omega_r > 0) || !(kappa >= 0))
    throw std::invalid_argument("build_reduced_model: omega_r must be > 0 and kappa >= 0");
  return {chi_z, omega_r, omega_q, kappa};
}

}  // namespace lro
