#include "lro/operators.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "lro/errors.hpp"

namespace lro {

void TransmonSpec::validate() const {
  if (!(e_c > 0)) throw std::invalid_argument("TransmonSpec: e_c must be > 0");
  if (!(e_j > 0)) throw std::invalid_argument("TransmonSpec: e_j must be > 0");
  if (!(std::abs(d) < 1)) throw std::invalid_argument("TransmonSpec: |d| must be < 1");
  if (!(n_g >= 0 && n_g < 1)) throw std::invalid_argument("TransmonSpec: n_g must lie in [0,1)");
  if (n_charge_cutoff < 1) throw std::invalid_argument("TransmonSpec: n_charge_cutoff must be >= 1");
  if (k_levels < 1 || k_levels > 2 * n_charge_cutoff + 1)
    throw std::invalid_argument("TransmonSpec: k_levels must lie in [1, 2 n_charge_cutoff + 1]");
}

void ResonatorSpec::validate() const {
  if (!(omega_r > 0)) throw std::invalid_argument("ResonatorSpec: omega_r must be > 0");
  if (!(phi_rzpf >= 0)) throw std::invalid_argument("ResonatorSpec: phi_rzpf must be >= 0");
  if (!(kappa >= 0)) throw std::invalid_argument("ResonatorSpec: kappa must be >= 0");
  if (n_fock < 2) throw std::invalid_argument("ResonatorSpec: n_fock must be >= 2");
}

namespace {

Eigen::MatrixXd charge_hamiltonian(const TransmonSpec& spec, int cutoff) {
  const int dim = 2 * cutoff + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double n = i - cutoff - spec.n_g;
    h(i, i) = 4.0 * spec.e_c * n * n;
    if (i + 1 < dim) h(i, i + 1) = h(i + 1, i) = -0.5 * spec.e_j;
  }
  return h;
}

// Top retained absolute eigenvalue for a given cutoff; used by the guard.
double top_retained_eigenvalue(const TransmonSpec& spec, int cutoff) {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  eigh_real(charge_hamiltonian(spec, cutoff), values, vectors);
  return values(spec.k_levels - 1);
}

}  // namespace

TransmonBasis transmon_eigensystem_unchecked(const TransmonSpec& spec) {
  spec.validate();
  const int cutoff = spec.n_charge_cutoff;
  const int dim = 2 * cutoff + 1;
  const int k = spec.k_levels;

  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  eigh_real(charge_hamiltonian(spec, cutoff), values, vectors);

  TransmonBasis basis;
  basis.vectors = vectors.leftCols(k);
  for (int j = 0; j < k; ++j) {
    Eigen::Index imax = 0;
    basis.vectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (basis.vectors(imax, j) < 0) basis.vectors.col(j) *= -1.0;
  }
  basis.energies = values.head(k).array() - values(0);

  // cos(phi) = (|n><n+1| + |n+1><n|) / 2 ; e^{i phi} raises the charge by one.
  Eigen::MatrixXd cos_c = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXcd sin_c = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXd n_c = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    n_c(i, i) = i - cutoff;
    if (i + 1 < dim) {
      cos_c(i, i + 1) = cos_c(i + 1, i) = 0.5;
      sin_c(i + 1, i) = cplx(0.0, -0.5);
      sin_c(i, i + 1) = cplx(0.0, 0.5);
    }
  }
  const Eigen::MatrixXd& v = basis.vectors;
  basis.cos_phi = v.transpose() * cos_c * v;
  basis.sin_phi = v.transpose().cast<cplx>() * sin_c * v.cast<cplx>();
  basis.charge_op = v.transpose() * n_c * v;
  return basis;
}

TransmonBasis transmon_eigensystem(const TransmonSpec& spec) {
  TransmonBasis basis = transmon_eigensystem_unchecked(spec);
  const double here = top_retained_eigenvalue(spec, spec.n_charge_cutoff);
  const double wider = top_retained_eigenvalue(spec, spec.n_charge_cutoff + 5);
  if (std::abs(here - wider) > 1e-8) {
    throw CutoffTooSmallError(fmt::format(
        "charge cutoff {} too small: level {} moves by {:.3g} GHz when the cutoff grows by 5",
        spec.n_charge_cutoff, spec.k_levels - 1, std::abs(here - wider)));
  }
  return basis;
}

Eigen::VectorXd laguerre_sequence(int m_max, int k, double x) {
  Eigen::VectorXd l(m_max + 1);
  l(0) = 1.0;
  if (m_max >= 1) l(1) = 1.0 + k - x;
  for (int m = 1; m < m_max; ++m)
    l(m + 1) = ((2.0 * m + 1.0 + k - x) * l(m) - (m + k) * l(m - 1)) / (m + 1.0);
  return l;
}

Eigen::MatrixXcd displacement_matrix(cplx alpha, int n_fock) {
  if (n_fock < 1) throw std::invalid_argument("displacement_matrix: n_fock must be >= 1");
  if (n_fock > kMaxFockForDisplacement)
    throw FockRangeError(fmt::format("displacement_matrix: n_fock {} exceeds the stable range {}",
                                     n_fock, kMaxFockForDisplacement));
  const double r = std::abs(alpha);
  if (r == 0.0) return Eigen::MatrixXcd::Identity(n_fock, n_fock);

  const double x = r * r;
  const double theta = std::arg(alpha);
  const double log_r = std::log(r);
  Eigen::MatrixXcd out(n_fock, n_fock);
  for (int k = 0; k < n_fock; ++k) {
    const int m_max = n_fock - 1 - k;
    const Eigen::VectorXd lag = laguerre_sequence(m_max, k, x);
    const cplx phase = std::polar(1.0, k * theta);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    for (int m = 0; m <= m_max; ++m) {
      const int n = m + k;
      const double log_pref =
          0.5 * (std::lgamma(m + 1.0) - std::lgamma(n + 1.0)) + k * log_r - 0.5 * x;
      const double mag = std::exp(log_pref) * lag(m);
      if (!std::isfinite(mag))
        throw FockRangeError(fmt::format("displacement_matrix: non-finite element <{}|D|{}>", n, m));
      out(n, m) = mag * phase;
      // D(alpha)^dag = D(-alpha) fixes the upper triangle.
      if (k > 0) out(m, n) = sign * std::conj(out(n, m));
    }
  }
  return out;
}

ResonatorOps resonator_operators(const ResonatorSpec& spec) {
  spec.validate();
  const int n = spec.n_fock;
  const Eigen::MatrixXcd d_plus = displacement_matrix(cplx(0.0, spec.phi_rzpf), n);
  const Eigen::MatrixXcd d_minus = displacement_matrix(cplx(0.0, -spec.phi_rzpf), n);

  ResonatorOps ops;
  ops.cos_phi_r = (0.5 * (d_plus + d_minus)).real();
  ops.sin_phi_r = ((d_plus - d_minus) / cplx(0.0, 2.0)).real();
  ops.sin_sq_half = 0.5 * (Eigen::MatrixXd::Identity(n, n) - ops.cos_phi_r);
  ops.annihilate = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) ops.annihilate(i - 1, i) = std::sqrt(static_cast<double>(i));
  return ops;
}

ParityOperators parity_operators(int k_levels, int n_fock) {
  if (k_levels < 1 || n_fock < 1) throw std::invalid_argument("parity_operators: empty space");
  auto alternating = [](int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = (i % 2 == 0) ? 1.0 : -1.0;
    return Eigen::MatrixXd(v.asDiagonal());
  };
  return {alternating(k_levels), alternating(n_fock)};
}

}  // namespace lro
