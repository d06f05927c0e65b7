#pragma once

// Parameter sweeps shared by the command-line front end and the tests:
// branch continuation of spectra across a gamma sweep and spectra of
// disordered chains.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "effective.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "third_quant.hpp"

namespace dssh {

inline std::vector<double> linspace(double a, double b, int steps) {
  if (steps < 1) throw std::invalid_argument("a grid needs at least one point");
  std::vector<double> out;
  for (int i = 0; i < steps; ++i) out.push_back(steps == 1 ? a : a + (b - a) * i / (steps - 1));
  return out;
}

/// perm[branch] = index in `next` continuing that branch of `prev`, chosen
/// greedily by the largest normalized biorthogonal overlap |<chi_prev|phi_next>|.
inline std::vector<int> continue_by_overlap(const SpectrumResult& prev, const SpectrumResult& next) {
  const int n = prev.size();
  MatrixXd score(n, n);
  for (int a = 0; a < n; ++a) {
    const double na = prev.left_vectors.row(a).norm();
    for (int b = 0; b < n; ++b)
      score(a, b) = std::abs((prev.left_vectors.row(a) * next.right_vectors.col(b))(0, 0)) / na;
  }
  std::vector<int> perm(n, -1);
  std::vector<char> used(n, 0);
  std::vector<std::pair<double, std::pair<int, int>>> entries;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) entries.push_back({score(a, b), {a, b}});
  std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  int assigned = 0;
  for (const auto& [s, ab] : entries) {
    if (assigned == n) break;
    const auto [a, b] = ab;
    if (perm[a] >= 0 || used[b]) continue;
    perm[a] = b;
    used[b] = 1;
    ++assigned;
  }
  return perm;
}

/// Reorders `next` so that mode m continues mode m of `prev`.
inline SpectrumResult reorder(const SpectrumResult& s, const std::vector<int>& perm) {
  SpectrumResult out = s;
  for (std::size_t m = 0; m < perm.size(); ++m) {
    out.eigenvalues(m) = s.eigenvalues(perm[m]);
    out.right_vectors.col(m) = s.right_vectors.col(perm[m]);
    out.left_vectors.row(m) = s.left_vectors.row(perm[m]);
    out.pt_class[m] = s.pt_class[perm[m]];
    out.defective[m] = s.defective[perm[m]];
  }
  return out;
}

/// perm[branch] = index in `next` nearest to branch value prev[branch] (greedy).
inline std::vector<int> continue_by_distance(const std::vector<cplx>& prev, const std::vector<cplx>& next) {
  const int n = static_cast<int>(prev.size());
  std::vector<std::pair<double, std::pair<int, int>>> entries;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) entries.push_back({std::abs(prev[a] - next[b]), {a, b}});
  std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<int> perm(n, -1);
  std::vector<char> used(n, 0);
  for (const auto& [d, ab] : entries) {
    const auto [a, b] = ab;
    if (perm[a] >= 0 || used[b]) continue;
    perm[a] = b;
    used[b] = 1;
  }
  return perm;
}

enum class DisorderTarget { effective, liouvillean };

/// All xi_j = 1: the realization that shifts every cell by the full amount.
inline std::vector<double> extreme_disorder(int n_cells) { return std::vector<double>(n_cells, 1.0); }

/// Effective-Hamiltonian eigenvalues or rapidities (Re >= 0 members) of a
/// disordered chain, in (Re, Im) order.
inline std::vector<cplx> disordered_spectrum(const ModelConfig& c, double R, const std::vector<double>& xi,
                                             DisorderTarget target) {
  const DisorderRealization d = apply_disorder(c, R, xi);
  if (target == DisorderTarget::effective) {
    Eigen::ComplexEigenSolver<MatrixXcd> es(build_real_space_hamiltonian(c, &d).entries, false);
    std::vector<cplx> v = to_vector(es.eigenvalues());
    std::stable_sort(v.begin(), v.end(), lex_less);
    return v;
  }
  return rapidities(build_shape_matrix(c, &d)).betas;
}

inline double max_abs_imag(const std::vector<cplx>& v) {
  double m = 0.0;
  for (cplx x : v) m = std::max(m, std::abs(x.imag()));
  return m;
}

inline double min_abs_imag(const std::vector<cplx>& v) {
  double m = std::numeric_limits<double>::infinity();
  for (cplx x : v) m = std::min(m, std::abs(x.imag()));
  return m;
}

}  // namespace dssh
