#include "lro/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace lro {

Eigen::VectorXcd JointEigensystem::vector(int idx) const {
  return std::visit([idx](const auto& v) -> Eigen::VectorXcd { return v.col(idx).template cast<cplx>(); },
                    solution.vectors);
}

double JointEigensystem::orthonormality_defect() const {
  return std::visit(
      [](const auto& v) {
        using M = std::decay_t<decltype(v)>;
        M g = v.adjoint() * v;
        g.diagonal().array() -= 1.0;
        return g.cwiseAbs().maxCoeff();
      },
      solution.vectors);
}

int default_rung_cap(int k_levels, int n_fock) {
  const int guard = static_cast<int>(std::ceil(4.0 * std::sqrt(static_cast<double>(k_levels)) - 1e-12));
  return std::max(1, n_fock - guard);
}

JointEigensystem diagonalize(const JointHamiltonian& h) {
  pin_blas_single_thread();
  JointEigensystem out;
  out.k_levels = h.k_levels;
  out.n_fock = h.n_fock;
  out.solution = eigh(h.matrix);
  out.eigenvalues = out.solution.values;
  return out;
}

namespace {

template <class Mat>
void fill_rung(const Mat& v, int idx, int k, int n, double energy, Rung& rung) {
  rung.eigen_index = idx;
  rung.energy = energy;
  rung.n_t = 0.0;
  rung.n_r = 0.0;
  rung.parity = 0.0;
  double best = -1.0;
  for (int j = 0; j < k; ++j) {
    double pj = 0.0;
    for (int m = 0; m < n; ++m) {
      const double p = std::norm(v(j * n + m, idx));
      pj += p;
      rung.n_r += m * p;
    }
    rung.n_t += j * pj;
    rung.parity += (j % 2 == 0 ? pj : -pj);
    if (pj > best) {
      best = pj;
      rung.dominant_level = j;
    }
  }
}

struct Pick {
  int index = -1;
  double top = -1.0;
  double second = -1.0;
};

template <class Vec>
Pick pick_max(const Vec& overlaps, const std::vector<char>& taken) {
  Pick p;
  for (Eigen::Index i = 0; i < overlaps.size(); ++i) {
    if (taken[i]) continue;
    const double o = std::norm(overlaps(i));
    if (o > p.top) {
      p.second = p.top;
      p.top = o;
      p.index = static_cast<int>(i);
    } else if (o > p.second) {
      p.second = o;
    }
  }
  return p;
}

template <class Mat>
BranchTable label_impl(const Mat& v, const Eigen::VectorXd& energies, int k, int n, int cap) {
  using Scalar = typename Mat::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const int dim = k * n;
  BranchTable bt;
  bt.k_levels = k;
  bt.n_fock = n;
  bt.rung_cap = cap;
  bt.branches.assign(k, std::vector<Rung>(cap));
  bt.assignment.assign(dim, {-1, -1});
  std::vector<char> taken(dim, 0);

  auto note = [&](const Pick& p, int branch, int rung) {
    if (p.second >= 0.0 && p.top - p.second < 1e-6) {
      ++bt.tie_warnings;
      if (bt.warnings.size() < 8)
        bt.warnings.push_back(fmt::format("near-degenerate overlaps at branch {} rung {} ({:.3e} vs {:.3e})",
                                          branch, rung, p.top, p.second));
    }
  };
  auto take = [&](int branch, int rung, int idx) {
    if (idx < 0 || idx >= dim) throw std::logic_error("label_branches: ran out of eigenstates");
    taken[static_cast<std::size_t>(idx)] = 1;
    bt.assignment[idx] = {branch, rung};
    fill_rung(v, idx, k, n, energies(idx), bt.branches[branch][rung]);
  };

  for (int j = 0; j < k; ++j) {
    const Vec row = v.row(j * n).transpose();
    const Pick p = pick_max(row, taken);
    note(p, j, 0);
    take(j, 0, p.index);
  }

  Vec raised(dim);
  for (int j = 0; j < k; ++j) {
    for (int r = 1; r < cap; ++r) {
      const int prev = bt.branches[j][r - 1].eigen_index;
      raised.setZero();
      for (int b = 0; b < k; ++b)
        for (int m = 1; m < n; ++m) raised(b * n + m) = std::sqrt(static_cast<double>(m)) * v(b * n + m - 1, prev);
      const Vec overlaps = v.adjoint() * raised;
      const Pick p = pick_max(overlaps, taken);
      note(p, j, r);
      take(j, r, p.index);
    }
  }
  return bt;
}

}  // namespace

BranchTable label_branches(const JointEigensystem& eig, int rung_cap) {
  const int k = eig.k_levels;
  const int n = eig.n_fock;
  const int cap = rung_cap > 0 ? std::min(rung_cap, n) : default_rung_cap(k, n);
  return std::visit([&](const auto& v) { return label_impl(v, eig.eigenvalues, k, n, cap); },
                    eig.solution.vectors);
}

double dressed_resonator_frequency(const BranchTable& bt) {
  if (bt.branches.empty() || bt.rung_cap < 2) throw std::invalid_argument("need at least two rungs of branch 0");
  return bt.branches[0][1].energy - bt.branches[0][0].energy;
}

std::vector<ModularPoint> modular_spectrum(const BranchTable& bt, double omega_r, int max_branches, double offset) {
  if (!(omega_r > 0.0)) throw std::invalid_argument("modular_spectrum: fold frequency must be positive");
  std::vector<ModularPoint> out;
  const int nb = std::min<int>(max_branches, static_cast<int>(bt.branches.size()));
  for (int j = 0; j < nb; ++j) {
    for (int r = 0; r < static_cast<int>(bt.branches[j].size()); ++r) {
      const Rung& rung = bt.branches[j][r];
      double f = std::fmod(rung.energy - offset, omega_r);
      if (f < 0.0) f += omega_r;
      if (f >= omega_r) f = 0.0;
      out.push_back({j, r, rung.n_r, f});
    }
  }
  return out;
}

std::optional<int> first_sustained_excursion(const std::vector<double>& n_t, double threshold,
                                             int run_length, int limit) {
  const int stop = std::min<int>(limit, static_cast<int>(n_t.size()));
  int run = 0;
  for (int i = 0; i < stop; ++i) {
    if (n_t[i] > threshold) {
      if (++run >= run_length) return i - run_length + 1;
    } else {
      run = 0;
    }
  }
  return std::nullopt;
}

NcritResult find_ncrit(const BranchTable& bt, const NcritOptions& options) {
  if (bt.branches.size() < 2) throw std::invalid_argument("find_ncrit: needs branches 0 and 1");
  NcritResult res;
  res.search_limit = options.search_limit > 0 ? options.search_limit
                                              : std::min(bt.n_fock - 10, bt.rung_cap);
  res.search_limit = std::min(res.search_limit, bt.rung_cap);

  auto scan = [&](int branch, double thr, int& value, bool& censored) {
    std::vector<double> nt;
    for (const auto& rung : bt.branches[branch]) nt.push_back(rung.n_t);
    const auto hit = first_sustained_excursion(nt, thr, options.run_length, res.search_limit);
    censored = !hit.has_value();
    value = hit.value_or(res.search_limit);
  };
  scan(0, options.ground_threshold, res.n_crit_0, res.censored_0);
  scan(1, options.excited_threshold, res.n_crit_1, res.censored_1);
  res.n_crit = std::min(res.n_crit_0, res.n_crit_1);
  res.censored = res.censored_0 && res.censored_1;
  if (!res.censored) {
    res.trigger_branch = (!res.censored_0 && (res.censored_1 || res.n_crit_0 <= res.n_crit_1)) ? 0 : 1;
    res.partner_level = bt.branches[res.trigger_branch][res.n_crit].dominant_level;
  }
  return res;
}

std::vector<BranchSwap> detect_swaps(const BranchTable& bt, const std::vector<int>& branches,
                                     int run_length, int limit) {
  std::vector<BranchSwap> out;
  const int stop = limit > 0 ? std::min(limit, bt.rung_cap) : bt.rung_cap;
  for (int b : branches) {
    if (b < 0 || b >= static_cast<int>(bt.branches.size())) continue;
    const auto& br = bt.branches[b];
    int r = 0;
    while (r < stop) {
      if (br[r].dominant_level == b) {
        ++r;
        continue;
      }
      int e = r;
      while (e < stop && br[e].dominant_level != b) ++e;
      if (e - r >= run_length) {
        const int partner = br[r].dominant_level;
        out.push_back({b, partner, r, (partner % 2) == (b % 2)});
      }
      r = e;
    }
  }
  return out;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "e_j_over_e_c") return SweepAxis::EjOverEc;
  if (name == "delta") return SweepAxis::Delta;
  if (name == "d") return SweepAxis::Asymmetry;
  if (name == "n_g") return SweepAxis::GateCharge;
  throw std::invalid_argument("unknown sweep axis '" + name + "' (expected e_j_over_e_c, delta, d or n_g)");
}

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::EjOverEc: return "e_j_over_e_c";
    case SweepAxis::Delta: return "delta";
    case SweepAxis::Asymmetry: return "d";
    case SweepAxis::GateCharge: return "n_g";
  }
  return "?";
}

std::pair<TransmonSpec, ResonatorSpec> sweep_point(const SweepSpec& spec, double v1, double v2) {
  TransmonSpec t = spec.transmon;
  ResonatorSpec r = spec.resonator;
  double ratio = spec.e_j_over_e_c;
  double delta = spec.delta;
  auto apply = [&](SweepAxis a, double v) {
    switch (a) {
      case SweepAxis::EjOverEc: ratio = v; break;
      case SweepAxis::Delta: delta = v; break;
      case SweepAxis::Asymmetry: t.d = v; break;
      case SweepAxis::GateCharge: t.n_g = v; break;
    }
  };
  apply(spec.axis_1.axis, v1);
  apply(spec.axis_2.axis, v2);
  t.e_j = ratio * t.e_c;
  const TransmonBasis basis = transmon_eigensystem(t);
  r.omega_r = basis.energies(1) - delta;
  return {t, r};
}

NcritResult ncrit_for(const TransmonSpec& t, const ResonatorSpec& r, const NcritOptions& options) {
  const JointHamiltonian h = assemble_hamiltonian(t, r);
  const JointEigensystem eig = diagonalize(h);
  return find_ncrit(label_branches(eig), options);
}

CritMap sweep_ncrit(const SweepSpec& spec) {
  const int n1 = static_cast<int>(spec.axis_1.values.size());
  const int n2 = static_cast<int>(spec.axis_2.values.size());
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("sweep_ncrit: empty axis");
  if (spec.axis_1.axis == spec.axis_2.axis) throw std::invalid_argument("sweep_ncrit: axes must differ");

  CritMap map;
  map.axis_1 = spec.axis_1;
  map.axis_2 = spec.axis_2;
  map.n_crit = Eigen::MatrixXi::Zero(n1, n2);
  map.censored.setConstant(n1, n2, false);
  map.n_crit_0 = map.n_crit;
  map.n_crit_1 = map.n_crit;
  map.trigger_branch = Eigen::MatrixXi::Constant(n1, n2, -1);
  map.partner_level = Eigen::MatrixXi::Constant(n1, n2, -1);
  map.omega_r = Eigen::MatrixXd::Constant(n1, n2, std::nan(""));
  map.omega_q = map.omega_r;
  map.errors.assign(static_cast<std::size_t>(n1) * n2, "");
  map.search_limit = spec.ncrit.search_limit > 0
                         ? spec.ncrit.search_limit
                         : std::min(spec.resonator.n_fock - 10,
                                    default_rung_cap(spec.transmon.k_levels, spec.resonator.n_fock));

  parallel_for(static_cast<std::size_t>(n1) * n2, spec.workers, [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / n2;
    const int j = static_cast<int>(idx) % n2;
    try {
      const auto [t, r] = sweep_point(spec, spec.axis_1.values[i], spec.axis_2.values[j]);
      map.omega_r(i, j) = r.omega_r;
      map.omega_q(i, j) = r.omega_r + (spec.axis_1.axis == SweepAxis::Delta   ? spec.axis_1.values[i]
                                       : spec.axis_2.axis == SweepAxis::Delta ? spec.axis_2.values[j]
                                                                              : spec.delta);
      const NcritResult res = ncrit_for(t, r, spec.ncrit);
      map.n_crit(i, j) = res.n_crit;
      map.censored(i, j) = res.censored;
      map.n_crit_0(i, j) = res.n_crit_0;
      map.n_crit_1(i, j) = res.n_crit_1;
      map.trigger_branch(i, j) = res.trigger_branch;
      map.partner_level(i, j) = res.partner_level;
    } catch (const std::exception& e) {
      map.errors[idx] = e.what();
      map.n_crit(i, j) = -1;
    }
  });
  return map;
}

}  // namespace lro
