#pragma once

#include <utility>

#include <Eigen/Dense>

#include "lro/operators.hpp"

namespace lro {

/// Element values with C_1 = C_2 = c. Capacitances in fF, inductance in nH,
/// Josephson energies in GHz.
struct CircuitElements {
  double c = 0.0;
  double c_r = 0.0;
  double l_r = 0.0;
  double e_j1 = 0.0;
  double e_j2 = 0.0;
};

struct DerivedQubitParams {
  double omega_p = 0.0;      // sqrt(8 E_J E_C)
  double omega_q = 0.0;      // exact omega_1 - omega_0
  double z = 0.0;            // sqrt(8 E_C / E_J)
  double delta = 0.0;        // omega_q - omega_r
  double chi_z_pert = 0.0;   // -omega_p phi_rzpf^2 / 4
  double chi_z_exact = 0.0;  // exact chi_z(0) from the diagonal coupling

  /// Longitudinal coupling g_z = chi_z(0) alpha in the displaced frame.
  double g_z(double alpha) const { return chi_z_exact * alpha; }
};

/// Full joint Hamiltonian in the |j_t> (x) |n_r> product basis, index
/// j * N + n. Drives are not included.
struct JointHamiltonian {
  Eigen::MatrixXcd matrix;
  int k_levels = 0;
  int n_fock = 0;
  TransmonSpec transmon;
  ResonatorSpec resonator;
  TransmonBasis basis;

  int dim() const { return k_levels * n_fock; }
};

/// Qubit (two level) times Fock model, H = omega_r a^dag a + chi_z sigma_z a^dag a
/// (+ omega_q sigma_z / 2). Drives are applied by the readout simulation.
struct ReducedModel {
  double chi_z = 0.0;
  double omega_r = 0.0;
  double omega_q = 0.0;
  double kappa = 0.0;

  double g_z(double alpha) const { return chi_z * alpha; }
};

std::pair<TransmonSpec, ResonatorSpec> reduce_circuit(const CircuitElements& elems);

/// Resonator charging and inductive energies (GHz) for the given elements.
double resonator_charging_energy(const CircuitElements& elems);
double resonator_inductive_energy(const CircuitElements& elems);

/// H = omega_r a^dag a + H_t + 2 E_J sin^2(phi_r/2) cos(phi_t) - d E_J sin(phi_r) sin(phi_t)
JointHamiltonian assemble_hamiltonian(const TransmonSpec& t, const ResonatorSpec& r);

/// Assembly from precomputed single-mode operators. Throws
/// DimensionMismatchError when the operator sizes disagree with the specs.
JointHamiltonian assemble_hamiltonian(const TransmonSpec& t, const ResonatorSpec& r,
                                      const TransmonBasis& basis, const ResonatorOps& ops);

DerivedQubitParams derived_params(const TransmonSpec& t, const ResonatorSpec& r);

ReducedModel build_reduced_model(double chi_z, double omega_r, double omega_q, double kappa);

/// Kronecker product A (x) B.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace lro
