#pragma once

// Exact diagonalization of the joint Hamiltonian, branch labeling,
// critical photon numbers and parameter sweeps.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lro/circuit.hpp"
#include "lro/linalg.hpp"

namespace lro {

struct JointEigensystem {
  Eigen::VectorXd eigenvalues;  // ascending, GHz
  HermitianEigen solution;      // eigenvectors in the product basis, index j * N + n
  int k_levels = 0;
  int n_fock = 0;
  int dim() const { return k_levels * n_fock; }
  bool is_real() const { return solution.is_real(); }
  /// Column `idx` as a complex vector.
  Eigen::VectorXcd vector(int idx) const;
  /// max |V^dag V - I|. Costs a full matrix product.
  double orthonormality_defect() const;
};

struct Rung {
  int eigen_index = -1;
  double energy = 0.0;
  double n_t = 0.0;        // sum_k k |<k, m|state>|^2
  double n_r = 0.0;        // <a^dag a>
  int dominant_level = 0;  // transmon level with the largest reduced population
  double parity = 0.0;     // <(-1)^{j_t}>
};

struct BranchTable {
  int k_levels = 0;
  int n_fock = 0;
  int rung_cap = 0;  // rungs 0..rung_cap-1 are labeled
  std::vector<std::vector<Rung>> branches;
  /// eigen-index -> (branch, rung); (-1, -1) when unlabeled.
  std::vector<std::pair<int, int>> assignment;
  int tie_warnings = 0;
  std::vector<std::string> warnings;  // first few tie messages
};

/// Labeled rungs are cut at N - ceil(4 sqrt(K)).
int default_rung_cap(int k_levels, int n_fock);

JointEigensystem diagonalize(const JointHamiltonian& h);

/// Seeds every branch on the state of maximal |<j,0|lambda>|^2, then follows
/// each branch by the maximal |<lambda|a^dag|previous>|^2 among states not yet
/// labeled. Ties go to the lower eigen-index.
BranchTable label_branches(const JointEigensystem& eig, int rung_cap = -1);

struct ModularPoint {
  int branch = 0;
  int rung = 0;
  double n_r = 0.0;
  double folded = 0.0;  // E mod omega_r in [0, omega_r)
};

/// Folds (E - offset) into [0, omega_r) for the first `max_branches` branches.
std::vector<ModularPoint> modular_spectrum(const BranchTable& bt, double omega_r, int max_branches = 15,
                                           double offset = 0.0);

/// E(0_t, 1_r) - E(0_t, 0_r) from a labeled table.
double dressed_resonator_frequency(const BranchTable& bt);

struct NcritOptions {
  double ground_threshold = 2.0;
  double excited_threshold = 3.0;
  int run_length = 3;
  int search_limit = -1;  // -1: min(n_fock - 10, rung cap)
};

struct NcritResult {
  int n_crit_0 = 0;
  bool censored_0 = true;
  int n_crit_1 = 0;
  bool censored_1 = true;
  int n_crit = 0;
  bool censored = true;
  int search_limit = 0;
  int trigger_branch = -1;  // 0 or 1, -1 when censored
  int partner_level = -1;   // dominant transmon level at the trigger rung
};

/// First rung of a run of `run_length` rungs with N_t > threshold, or
/// nullopt when none starts and completes below `limit`.
std::optional<int> first_sustained_excursion(const std::vector<double>& n_t, double threshold,
                                             int run_length, int limit);

NcritResult find_ncrit(const BranchTable& bt, const NcritOptions& options = {});

struct BranchSwap {
  int branch = 0;
  int partner = 0;  // dominant transmon level during the swap
  int rung = 0;     // first rung of the swapped run
  bool parity_preserving = true;
};

/// Runs of at least `run_length` rungs where a branch's dominant transmon
/// level differs from its own index, below `limit` (default rung cap).
std::vector<BranchSwap> detect_swaps(const BranchTable& bt, const std::vector<int>& branches = {0, 1},
                                     int run_length = 3, int limit = -1);

enum class SweepAxis { EjOverEc, Delta, Asymmetry, GateCharge };

SweepAxis parse_sweep_axis(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);

struct GridAxis {
  SweepAxis axis = SweepAxis::EjOverEc;
  std::vector<double> values;
};

struct SweepSpec {
  TransmonSpec transmon;    // e_c held fixed; e_j overridden by an E_J/E_C axis
  ResonatorSpec resonator;  // phi_rzpf and n_fock held fixed; omega_r from delta
  double e_j_over_e_c = 110.0;
  double delta = -2.64;     // omega_q - omega_r when not swept
  GridAxis axis_1;
  GridAxis axis_2;
  NcritOptions ncrit;
  int workers = 1;
};

struct CritMap {
  GridAxis axis_1;
  GridAxis axis_2;
  Eigen::MatrixXi n_crit;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> censored;
  Eigen::MatrixXi n_crit_0;
  Eigen::MatrixXi n_crit_1;
  Eigen::MatrixXi trigger_branch;
  Eigen::MatrixXi partner_level;
  Eigen::MatrixXd omega_r;
  Eigen::MatrixXd omega_q;
  int search_limit = 0;
  std::vector<std::string> errors;  // row-major, empty when the point succeeded
  bool failed(int i, int j) const { return !errors[i * axis_2.values.size() + j].empty(); }
};

/// Parameters of one grid point.
std::pair<TransmonSpec, ResonatorSpec> sweep_point(const SweepSpec& spec, double v1, double v2);

NcritResult ncrit_for(const TransmonSpec& t, const ResonatorSpec& r, const NcritOptions& options = {});

CritMap sweep_ncrit(const SweepSpec& spec);

}  // namespace lro
