#pragma once

// Single-mode operators: transmon eigenbasis from the charge basis, resonator
// Fock-space operators from exact displacement-operator matrix elements.
//
// Units: every frequency is stored as nu = omega / 2pi in GHz.

#include <complex>

#include <Eigen/Dense>

#include "lro/linalg.hpp"

namespace lro {

struct TransmonSpec {
  double e_c = 0.215;        // GHz
  double e_j = 110 * 0.215;  // GHz
  double n_g = 0.0;
  double d = 0.0;            // junction asymmetry (E_J2 - E_J1) / E_J
  int n_charge_cutoff = 30;  // charge states -cutoff..+cutoff
  int k_levels = 16;

  void validate() const;
};

struct ResonatorSpec {
  double omega_r = 8.8;   // GHz
  double phi_rzpf = 0.09;
  double kappa = 0.0;     // GHz, decay rate / 2pi
  int n_fock = 100;

  void validate() const;
};

/// Transmon eigenbasis. energies[0] == 0. All matrices are K x K.
struct TransmonBasis {
  Eigen::VectorXd energies;
  Eigen::MatrixXd cos_phi;
  Eigen::MatrixXcd sin_phi;   // purely imaginary, antisymmetric
  Eigen::MatrixXd charge_op;  // n (not n - n_g)
  Eigen::MatrixXd vectors;    // charge-basis eigenvectors, (2 cutoff + 1) x K

  int levels() const { return static_cast<int>(energies.size()); }
};

struct ResonatorOps {
  Eigen::MatrixXd annihilate;
  Eigen::MatrixXd cos_phi_r;
  Eigen::MatrixXd sin_sq_half;
  Eigen::MatrixXd sin_phi_r;

  int dim() const { return static_cast<int>(annihilate.rows()); }
};

struct ParityOperators {
  Eigen::MatrixXd transmon;   // diag((-1)^j)
  Eigen::MatrixXd resonator;  // diag((-1)^n)
};

/// Eigen-decomposes 4 E_C (n - n_g)^2 - E_J cos(phi) in the charge basis and
/// keeps the lowest k_levels states. Each eigenvector is phase-fixed so its
/// largest-magnitude charge component is real positive.
///
/// Throws CutoffTooSmallError when the highest retained eigenvalue moves by
/// more than 1e-8 GHz on enlarging the charge cutoff by 5.
TransmonBasis transmon_eigensystem(const TransmonSpec& spec);

/// Same decomposition without the convergence guard.
TransmonBasis transmon_eigensystem_unchecked(const TransmonSpec& spec);

/// Largest Fock cutoff for which displacement_matrix is guaranteed finite.
/// The Laguerre magnitudes are bounded by binom(2N, N) e^{|alpha|^2/2}, which
/// stays below the double range for N <= 500.
inline constexpr int kMaxFockForDisplacement = 500;

/// <n|D(alpha)|m> in an N-state Fock space, from the Cahill-Glauber form
/// with Laguerre polynomials by upward recurrence and log-space factorials.
Eigen::MatrixXcd displacement_matrix(cplx alpha, int n_fock);

/// Generalized Laguerre L_m^{(k)}(x) for m = 0..m_max, by upward recurrence.
Eigen::VectorXd laguerre_sequence(int m_max, int k, double x);

/// cos, sin and sin^2(phi_r/2) of phi_r = phi_rzpf (a + a^dag), plus a.
ResonatorOps resonator_operators(const ResonatorSpec& spec);

ParityOperators parity_operators(int k_levels, int n_fock);

}  // namespace lro
