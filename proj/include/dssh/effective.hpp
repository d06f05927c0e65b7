#pragma once

// PT-symmetric effective Hamiltonians: real-space and Bloch matrices,
// biorthogonal spectra, PT classification, the Lambda = Sigma_x Sigma_z
// spectral pairing, and the maximally PT-broken ground state (MBS).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "model.hpp"

namespace dssh {

enum class OperatorLabel { realspace_H, bloch_H };

struct ComplexOperator {
  int dim = 0;
  MatrixXcd entries;
  OperatorLabel label = OperatorLabel::realspace_H;
};

/// Diagonal complex potential of the dissipation pattern: U1 puts -i gamma on
/// the first and +i gamma on the last site, U2 alternates +i gamma (even
/// 0-based sites, the gain sites) and -i gamma.
inline VectorXcd complex_potential(const ModelConfig& c) {
  c.validate();
  VectorXcd v = VectorXcd::Zero(c.n);
  switch (c.pattern) {
    case Pattern::none:
      break;
    case Pattern::u1:
      v(0) = -I * c.gamma;
      v(c.n - 1) = I * c.gamma;
      break;
    case Pattern::u2:
      for (int s = 0; s < c.n; ++s) v(s) = (s % 2 == 0 ? I : -I) * c.gamma;
      break;
  }
  return v;
}

inline ComplexOperator build_real_space_hamiltonian(const ModelConfig& c,
                                                    const DisorderRealization* disorder = nullptr) {
  ComplexOperator op;
  op.dim = c.n;
  op.label = OperatorLabel::realspace_H;
  op.entries = hopping_matrix(c, disorder).cast<cplx>();
  op.entries.diagonal() += complex_potential(c);
  return op;
}

inline ComplexOperator build_bloch_hamiltonian(const ModelConfig& c, double k) {
  if (c.pattern == Pattern::u1)
    throw std::invalid_argument("U1 is not translation invariant; no Bloch Hamiltonian");
  const auto [t1, t2] = hopping_amplitudes(c);
  const double g = c.pattern == Pattern::u2 ? c.gamma : 0.0;
  ComplexOperator op;
  op.dim = 2;
  op.label = OperatorLabel::bloch_H;
  op.entries.resize(2, 2);
  op.entries << I * g, -t1 - t2 * std::exp(I * k), -t1 - t2 * std::exp(-I * k), -I * g;
  return op;
}

/// Closed-form band energies +-sqrt(t1^2 + t2^2 + 2 t1 t2 cos k - gamma^2).
inline std::pair<cplx, cplx> bloch_band_energies(const ModelConfig& c, double k) {
  if (c.pattern == Pattern::u1)
    throw std::invalid_argument("U1 is not translation invariant; no Bloch bands");
  const auto [t1, t2] = hopping_amplitudes(c);
  const double g = c.pattern == Pattern::u2 ? c.gamma : 0.0;
  const cplx e = std::sqrt(cplx(t1 * t1 + t2 * t2 + 2.0 * t1 * t2 * std::cos(k) - g * g, 0.0));
  return {e, -e};
}

enum class PtClass { real, gain_broken, loss_broken };

inline std::string to_string(PtClass p) {
  switch (p) {
    case PtClass::real: return "real";
    case PtClass::gain_broken: return "gain_broken";
    case PtClass::loss_broken: return "loss_broken";
  }
  return "real";
}

inline constexpr double default_pt_tol = 1e-10;
inline constexpr double defective_threshold = 1e8;  // ||chi|| ||phi|| / |<chi|phi>|

struct SpectrumResult {
  VectorXcd eigenvalues;
  MatrixXcd right_vectors;  // columns, unit norm
  MatrixXcd left_vectors;   // rows, <chi_m|phi_l> = delta_ml
  std::vector<PtClass> pt_class;
  std::vector<bool> defective;
  MatrixXcd source;  // the diagonalized matrix, kept for symmetry and residual checks

  int size() const { return static_cast<int>(eigenvalues.size()); }
  double spectral_radius() const { return eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0; }
  double scale() const { return std::max(1.0, spectral_radius()); }
  bool any_defective() const { return std::find(defective.begin(), defective.end(), true) != defective.end(); }
};

inline PtClass pt_class_of(cplx e, double tol_abs) {
  if (e.imag() > tol_abs) return PtClass::gain_broken;
  if (e.imag() < -tol_abs) return PtClass::loss_broken;
  return PtClass::real;
}

/// Full biorthogonal eigendecomposition, sorted by (Re, Im).
///
/// Near-exceptional pairs are marked in `defective` rather than aborting.
inline SpectrumResult complex_spectrum(const ComplexOperator& op) {
  if (op.dim < 1 || op.entries.rows() != op.dim || op.entries.cols() != op.dim)
    throw std::invalid_argument("complex_spectrum: malformed operator");
  Eigensystem es = eig(op.entries);
  sort_lexicographic(es);
  SpectrumResult r;
  r.eigenvalues = es.values;
  r.right_vectors = es.right;
  r.left_vectors = es.left;
  r.source = op.entries;
  const double tol = default_pt_tol * r.scale();
  for (Eigen::Index m = 0; m < es.values.size(); ++m) {
    r.pt_class.push_back(pt_class_of(es.values(m), tol));
    r.defective.push_back(!(es.condition(m) < defective_threshold));
  }
  return r;
}

/// Max over modes of ||H phi - E phi|| / ||H||.
inline double max_relative_residual(const SpectrumResult& s) {
  const double hn = std::max(s.source.norm(), std::numeric_limits<double>::min());
  double worst = 0.0;
  for (int m = 0; m < s.size(); ++m)
    worst = std::max(worst, (s.source * s.right_vectors.col(m) - s.eigenvalues(m) * s.right_vectors.col(m)).norm() / hn);
  return worst;
}

/// Lambda = Sigma_x Sigma_z: anti-diagonal with Lambda(i, n-1-i) = (-1)^(n-1-i).
inline MatrixXd lambda_operator(int n) {
  MatrixXd l = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) l(i, n - 1 - i) = ((n - 1 - i) % 2 == 0) ? 1.0 : -1.0;
  return l;
}

/// Multiset distance between {E} and {-E}.
inline double lambda_pairing_error(const SpectrumResult& s) {
  std::vector<cplx> e = to_vector(s.eigenvalues), neg;
  for (cplx x : e) neg.push_back(-x);
  return multiset_distance(e, neg);
}

/// True iff the spectrum is symmetric under E -> -E and Lambda^dag H Lambda = -H,
/// both within tol (absolute).
inline bool check_lambda_symmetry(const SpectrumResult& s, double tol) {
  const auto n = s.source.rows();
  const MatrixXcd l = lambda_operator(static_cast<int>(n)).cast<cplx>();
  const double op_err = (l.adjoint() * s.source * l + s.source).cwiseAbs().maxCoeff();
  return op_err <= tol && lambda_pairing_error(s) <= tol;
}

struct PtClassification {
  std::vector<PtClass> modes;
  bool unbroken = true;
};

/// Mode is real iff |Im E| <= tol_im * max(1, spectral radius).
inline PtClassification classify_pt(const SpectrumResult& s, double tol_im = default_pt_tol) {
  PtClassification out;
  const double tol = tol_im * s.scale();
  for (int m = 0; m < s.size(); ++m) {
    out.modes.push_back(pt_class_of(s.eigenvalues(m), tol));
    if (out.modes.back() != PtClass::real) out.unbroken = false;
  }
  return out;
}

enum class ModeRationale { negative_real_energy, gain_filled, loss_emptied, unoccupied };

inline std::string to_string(ModeRationale r) {
  switch (r) {
    case ModeRationale::negative_real_energy: return "negative_real_energy";
    case ModeRationale::gain_filled: return "gain_filled";
    case ModeRationale::loss_emptied: return "loss_emptied";
    case ModeRationale::unoccupied: return "unoccupied";
  }
  return "unoccupied";
}

struct ModeSelection {
  std::vector<int> occupied;
  std::vector<ModeRationale> rationale;  // one per mode
  bool unique = true;                    // false if some |E| <= tol (zero mode)
};

/// MBS mode selection: modes with Im E > 0 are filled, Im E < 0 emptied, and
/// real modes occupied iff Re E <= 0 (zero modes included). Tolerances are
/// relative to max(1, spectral radius).
inline ModeSelection construct_mbs(const SpectrumResult& s, double tol = default_pt_tol) {
  ModeSelection sel;
  const double t = tol * s.scale();
  for (int m = 0; m < s.size(); ++m) {
    const cplx e = s.eigenvalues(m);
    ModeRationale r;
    if (e.imag() > t)
      r = ModeRationale::gain_filled;
    else if (e.imag() < -t)
      r = ModeRationale::loss_emptied;
    else
      r = e.real() <= t ? ModeRationale::negative_real_energy : ModeRationale::unoccupied;
    sel.rationale.push_back(r);
    if (r == ModeRationale::gain_filled || r == ModeRationale::negative_real_energy) sel.occupied.push_back(m);
    if (std::abs(e) <= t) sel.unique = false;
  }
  return sel;
}

enum class MbsWeighting {
  right_norm,     // |phi_{m,i}|^2 of unit-norm right vectors
  biorthogonal,   // Re(chi_{m,i} phi_{m,i}) with <chi_m|phi_m> = 1
};

inline OccupationProfile mbs_occupation(const SpectrumResult& s, const ModeSelection& sel,
                                        MbsWeighting w = MbsWeighting::right_norm, double tol = 1e-8) {
  const auto n = s.right_vectors.rows();
  OccupationProfile p;
  p.values.assign(static_cast<std::size_t>(n), 0.0);
  for (int m : sel.occupied) {
    const auto phi = s.right_vectors.col(m);
    const double norm2 = phi.squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w == MbsWeighting::right_norm) {
        p.values[i] += std::norm(phi(i)) / norm2;
      } else {
        const cplx v = s.left_vectors(m, i) * phi(i);
        p.values[i] += v.real();
      }
    }
  }
  for (double v : p.values)
    if (v < -tol || v > 1.0 + tol) p.out_of_range = true;
  return p;
}

}  // namespace dssh
