#include "lro/schrieffer_wolff.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

namespace lro {

NearResonanceError::NearResonanceError(int li, int pi, int lk, int pk, double den, double eta)
    : std::runtime_error(fmt::format(
          "near-resonant denominator {:.3e} GHz between |{}_t,{}_r> and |{}_t,{}_r> (|eta| = {:.3e} GHz)",
          den, li, pi, lk, pk, std::abs(eta))),
      level_i(li), photons_i(pi), level_k(lk), photons_k(pk), denominator(den), coupling(eta) {}

double dispersive_shift_exact(double e_j, const TransmonBasis& basis, double phi) {
  const double x = phi * phi;
  return 0.5 * e_j * x * std::exp(-0.5 * x) * (basis.cos_phi(1, 1) - basis.cos_phi(0, 0));
}

double phi_rzpf_for_chi(const TransmonSpec& t, double chi) {
  const TransmonBasis basis = transmon_eigensystem(t);
  auto f = [&](double phi) { return dispersive_shift_exact(t.e_j, basis, phi) - chi; };
  const double lo = 1e-9, hi = 1.0;
  if (f(lo) * f(hi) > 0.0)
    throw std::invalid_argument(fmt::format("no phi_rzpf in (0, 1] gives chi_z = {} GHz", chi));
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

DiagonalModel sw_diagonal(const TransmonSpec& t, const ResonatorSpec& r, const TransmonBasis& basis) {
  r.validate();
  const int k = basis.levels();
  const int n = r.n_fock;
  const double x = r.phi_rzpf * r.phi_rzpf;
  const Eigen::VectorXd lag = laguerre_sequence(n - 1, 0, x);
  const double damp = std::exp(-0.5 * x);

  DiagonalModel dm;
  dm.omega_r = r.omega_r;
  dm.lamb = t.e_j * basis.cos_phi.diagonal();
  dm.diag_energy.resize(k, n);
  dm.chi_exact.resize(k, n);
  for (int j = 0; j < k; ++j) {
    const double c = basis.cos_phi(j, j);
    for (int m = 0; m < n; ++m)
      dm.diag_energy(j, m) = m * r.omega_r + basis.energies(j) + dm.lamb(j) - t.e_j * damp * lag(m) * c;
    dm.chi_exact(j, 0) = std::numeric_limits<double>::quiet_NaN();
    for (int m = 1; m < n; ++m)
      dm.chi_exact(j, m) = dm.diag_energy(j, m) - dm.diag_energy(j, m - 1) - r.omega_r;
  }
  if (k >= 2) {
    dm.chi_z0 = 0.5 * ((dm.diag_energy(1, 1) - dm.diag_energy(1, 0)) -
                       (dm.diag_energy(0, 1) - dm.diag_energy(0, 0)));
  }
  return dm;
}

DiagonalModel sw_diagonal(const TransmonSpec& t, const ResonatorSpec& r) {
  return sw_diagonal(t, r, transmon_eigensystem(t));
}

double CouplingElements::at(int a, int b, int c, int d) const {
  const auto idx = ((static_cast<std::size_t>(a) * k_levels + b) * n_fock + c) * n_fock + d;
  const int slot = lookup_.empty() ? -1 : lookup_[idx];
  return slot < 0 ? 0.0 : entries[slot].value;
}

void CouplingElements::index() {
  lookup_.assign(static_cast<std::size_t>(k_levels) * k_levels * n_fock * n_fock, -1);
  for (std::size_t s = 0; s < entries.size(); ++s) {
    const auto& e = entries[s];
    lookup_[((static_cast<std::size_t>(e.a) * k_levels + e.b) * n_fock + e.c) * n_fock + e.d] =
        static_cast<int>(s);
  }
}

CouplingElements sw_eta(const TransmonSpec& t, const ResonatorSpec& r, const TransmonBasis& basis) {
  r.validate();
  const int k = basis.levels();
  const int n = r.n_fock;
  const double phi = r.phi_rzpf;
  const double x = phi * phi;
  const double damp = std::exp(-0.5 * x);

  // Resonator factor for c >= d:
  //   -(1/2) e^{-x/2} sqrt(d!/c!) (i phi)^{c-d} L_d^{c-d}(x) [1 + (-1)^{c-d}]
  // which is real: only even c - d survive and (i)^{c-d} = (-1)^{(c-d)/2}.
  Eigen::MatrixXd res = Eigen::MatrixXd::Zero(n, n);
  for (int diff = 0; diff < n; diff += 2) {
    const Eigen::VectorXd lag = laguerre_sequence(n - 1 - diff, diff, x);
    const double sign = ((diff / 2) % 2 == 0) ? 1.0 : -1.0;
    for (int d = 0; d + diff < n; ++d) {
      const int c = d + diff;
      const double log_mag = 0.5 * (std::lgamma(d + 1.0) - std::lgamma(c + 1.0)) +
                             (diff > 0 ? diff * std::log(phi) : 0.0);
      const double v = -damp * sign * std::exp(log_mag) * lag(d);
      res(c, d) = v;
      res(d, c) = v;
    }
  }
  if (phi == 0.0) {
    res.setZero();
    res.diagonal().setConstant(-1.0);
  }

  CouplingElements out;
  out.k_levels = k;
  out.n_fock = n;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const double cab = t.e_j * basis.cos_phi(a, b);
      if (cab == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        for (int d = c % 2; d < n; d += 2) {
          const double v = cab * ((c == d ? 1.0 : 0.0) + res(c, d));
          if (v != 0.0) out.entries.push_back({a, b, c, d, v});
        }
      }
    }
  }
  out.index();
  return out;
}

CouplingElements sw_eta(const TransmonSpec& t, const ResonatorSpec& r) {
  return sw_eta(t, r, transmon_eigensystem(t));
}

SwCorrectedSpectrum sw_second_order(const TransmonSpec& t, const ResonatorSpec& r,
                                    const SwOptions& options) {
  if (t.d != 0.0)
    throw std::invalid_argument("sw_second_order: the expansion is derived for d = 0");
  if (options.m_max < 0 || options.m_max >= r.n_fock)
    throw std::invalid_argument("sw_second_order: m_max must lie in [0, n_fock)");

  const TransmonBasis basis = transmon_eigensystem(t);
  const DiagonalModel dm = sw_diagonal(t, r, basis);
  const CouplingElements eta = sw_eta(t, r, basis);
  const int k = basis.levels();
  const int n = r.n_fock;

  SwCorrectedSpectrum out;
  out.levels = options.levels;
  out.m_max = options.m_max;
  out.energy2.resize(static_cast<Eigen::Index>(options.levels.size()), options.m_max + 1);
  out.shift2.resizeLike(out.energy2);

  for (std::size_t li = 0; li < options.levels.size(); ++li) {
    const int i = options.levels[li];
    if (i < 0 || i >= k) throw std::invalid_argument("sw_second_order: level outside the basis");
    for (int m = 0; m <= options.m_max; ++m) {
      const double e_im = dm.diag_energy(i, m);
      double shift = 0.0;
      for (int kk = 0; kk < k; ++kk) {
        for (int l = m % 2; l < n; l += 2) {
          if (kk == i && l == m) continue;
          const double v = eta.at(i, kk, m, l);
          if (std::abs(v) <= options.coupling_floor) continue;
          const double den = e_im - dm.diag_energy(kk, l);
          if (std::abs(den) < options.resonance_tolerance) throw NearResonanceError(i, m, kk, l, den, v);
          // Diagonal element of H^(2): both symmetric denominators coincide.
          shift += v * eta.at(kk, i, l, m) / den;
        }
      }
      out.shift2(static_cast<Eigen::Index>(li), m) = shift;
      out.energy2(static_cast<Eigen::Index>(li), m) = e_im + shift;
    }
  }
  return out;
}

}  // namespace lro
