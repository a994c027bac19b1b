#pragma once

// Exact diagonal / off-diagonal split of the cos(phi_t) sin^2(phi_r/2)
// coupling and second-order Schrieffer-Wolff energies (d = 0).

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lro/operators.hpp"

namespace lro {

struct DiagonalModel {
  Eigen::VectorXd lamb;         // Lambda_j = E_J <j|cos phi_t|j>
  Eigen::MatrixXd diag_energy;  // D_j(m), K x N
  Eigen::MatrixXd chi_exact;    // D_j(m) - D_j(m-1) - omega_r; column 0 is NaN
  double chi_z0 = 0.0;          // ([D_1(1)-D_1(0)] - [D_0(1)-D_0(0)]) / 2
  double omega_r = 0.0;
};

/// One nonzero eta_{a,b,c,d} (GHz) entry.
struct EtaEntry {
  int a, b, c, d;
  double value;
};

/// eta entries stored only where the selection rules allow a nonzero value.
struct CouplingElements {
  int k_levels = 0;
  int n_fock = 0;
  std::vector<EtaEntry> entries;

  /// Dense lookup; returns 0 for pruned entries.
  double at(int a, int b, int c, int d) const;
  /// Builds the lookup index. Called by sw_eta.
  void index();

 private:
  std::vector<int> lookup_;
};

struct SwCorrectedSpectrum {
  std::vector<int> levels;  // transmon levels evaluated
  int m_max = 0;
  Eigen::MatrixXd energy2;  // (levels.size()) x (m_max + 1), D + second-order shift
  Eigen::MatrixXd shift2;   // second-order part alone
};

struct SwOptions {
  std::vector<int> levels{0, 1};
  int m_max = 10;
  double resonance_tolerance = 1e-3;  // GHz; 1 MHz
  double coupling_floor = 1e-12;      // GHz; smaller |eta| are treated as zero
};

/// Raised when a second-order denominator falls below the resonance
/// tolerance; carries the offending pair of product states.
class NearResonanceError : public std::runtime_error {
 public:
  NearResonanceError(int level_i, int photons_i, int level_k, int photons_k, double denominator,
                     double coupling);
  int level_i, photons_i, level_k, photons_k;
  double denominator, coupling;
};

/// chi_z(0) = E_J phi^2 e^{-phi^2/2} (<1|cos|1> - <0|cos|0>) / 2, in GHz.
double dispersive_shift_exact(double e_j, const TransmonBasis& basis, double phi_rzpf);

/// phi_rzpf in (0, 1] whose exact chi_z(0) equals `chi` (GHz, negative).
double phi_rzpf_for_chi(const TransmonSpec& t, double chi);

DiagonalModel sw_diagonal(const TransmonSpec& t, const ResonatorSpec& r);
DiagonalModel sw_diagonal(const TransmonSpec& t, const ResonatorSpec& r, const TransmonBasis& basis);

CouplingElements sw_eta(const TransmonSpec& t, const ResonatorSpec& r);
CouplingElements sw_eta(const TransmonSpec& t, const ResonatorSpec& r, const TransmonBasis& basis);

/// Diagonal second-order energies. Denominators are differences of the exact
/// diagonal energies D_i(n) - D_k(l), which carry the ac-Stark shifted
/// transmon frequencies and the photon-dependent resonator pull.
SwCorrectedSpectrum sw_second_order(const TransmonSpec& t, const ResonatorSpec& r,
                                    const SwOptions& options = {});

}  // namespace lro
