#pragma once

// Lindblad side of the model in the third-quantization picture: Majorana
// Hamiltonian, Lindblad coupling vectors, the 4n x 4n antisymmetric shape
// matrix and its rapidities, the 8 x 8 Bloch Liouvillean of the alternating
// gain/loss ring with its closed-form spectrum, and NESS occupations from the
// steady-state covariance matrix.
//
// Conventions: Majorana operators w_{2m} = c_m + c_m^dag, w_{2m+1} = i(c_m - c_m^dag)
// (0-based), H = sum_jk w_j H_jk w_k, and the master equation
//   d rho/dt = -i[H, rho] + sum_mu (2 L rho L^dag - {L^dag L, rho}),
// so a lone lossy site empties at rate 2 gamma.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "effective.hpp"
#include "linalg.hpp"
#include "model.hpp"

namespace dssh {

/// Antisymmetric 2n x 2n matrix H with sum_ab h_ab c_a^dag c_b = sum_jk w_j H_jk w_k + const.
inline MatrixXcd majorana_hamiltonian_from(const MatrixXcd& h) {
  const auto n = h.rows();
  // c^dag = (w_{2m} + i w_{2m+1}) / 2, c = (w_{2m} - i w_{2m+1}) / 2.
  const cplx u[2] = {1.0, I};
  const cplx v[2] = {1.0, -I};
  MatrixXcd coef = MatrixXcd::Zero(2 * n, 2 * n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      if (h(a, b) == cplx(0.0)) continue;
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) coef(2 * a + p, 2 * b + q) += 0.25 * h(a, b) * u[p] * v[q];
    }
  return 0.5 * (coef - coef.transpose());
}

/// Majorana form of the Hermitian hopping part (gain/loss enters through the
/// Lindblad vectors, not here).
inline MatrixXcd majorana_hamiltonian(const ModelConfig& c, const DisorderRealization* disorder = nullptr) {
  return majorana_hamiltonian_from(hopping_matrix(c, disorder).cast<cplx>());
}

/// Coefficients l with L = sum_j l_j w_j for sqrt(rate) c_site (loss) or
/// sqrt(rate) c_site^dag (gain).
inline VectorXcd lindblad_vector(int n, const Channel& ch) {
  VectorXcd l = VectorXcd::Zero(2 * n);
  const double a = 0.5 * std::sqrt(ch.rate);
  l(2 * ch.site) = a;
  l(2 * ch.site + 1) = ch.gain ? I * a : -I * a;
  return l;
}

/// One coefficient vector per site mu = 0..n-1; sites without a collapse
/// operator get the zero vector.
inline std::vector<VectorXcd> lindblad_vectors(const ModelConfig& c) {
  std::vector<VectorXcd> out(static_cast<std::size_t>(c.n), VectorXcd::Zero(2 * c.n));
  for (const Channel& ch : dissipation_channels(c)) out[ch.site] = lindblad_vector(c.n, ch);
  return out;
}

struct ShapeMatrix {
  int dim = 0;
  MatrixXcd entries;
  Pattern pattern = Pattern::none;
  Boundary boundary = Boundary::open;
};

/// Shape matrix from a Majorana Hamiltonian and the bath matrix
/// M_jk = sum_mu l_{mu,j} conj(l_{mu,k}).
///
/// With Majorana index j mapped to rows 2j, 2j+1:
///   A(2j,2k)     = -2i H_jk + M_jk - M_kj     A(2j,2k+1)   =  2i M_jk
///   A(2j+1,2k)   = -2i M_kj                   A(2j+1,2k+1) = -2i H_jk + M_kj - M_jk
/// The lower triangle is filled and mirrored, so A = -A^T holds exactly.
inline MatrixXcd shape_matrix_from(const MatrixXcd& hm, const MatrixXcd& bath) {
  const auto m = hm.rows();
  MatrixXcd a = MatrixXcd::Zero(2 * m, 2 * m);
  auto entry = [&](Eigen::Index r, Eigen::Index s) -> cplx {
    const Eigen::Index j = r / 2, k = s / 2;
    const int p = static_cast<int>(r % 2), q = static_cast<int>(s % 2);
    if (p == 0 && q == 0) return -2.0 * I * hm(j, k) + bath(j, k) - bath(k, j);
    if (p == 0 && q == 1) return 2.0 * I * bath(j, k);
    if (p == 1 && q == 0) return -2.0 * I * bath(k, j);
    return -2.0 * I * hm(j, k) + bath(k, j) - bath(j, k);
  };
  for (Eigen::Index r = 0; r < 2 * m; ++r)
    for (Eigen::Index s = 0; s < r; ++s) {
      a(r, s) = entry(r, s);
      a(s, r) = -a(r, s);
    }
  return a;
}

inline MatrixXcd bath_matrix(const std::vector<VectorXcd>& ls, Eigen::Index dim) {
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  for (const auto& l : ls) m += l * l.conjugate().transpose();
  return m;
}

inline ShapeMatrix build_shape_matrix(const ModelConfig& c, const DisorderRealization* disorder = nullptr) {
  c.validate();
  ShapeMatrix s;
  s.dim = 4 * c.n;
  s.pattern = c.pattern;
  s.boundary = c.boundary;
  const MatrixXcd hm = majorana_hamiltonian(c, disorder);
  s.entries = shape_matrix_from(hm, bath_matrix(lindblad_vectors(c), 2 * c.n));
  return s;
}

namespace blocks {

inline Eigen::Matrix2cd sigma_x() { return (Eigen::Matrix2cd() << 0, 1, 1, 0).finished(); }
inline Eigen::Matrix2cd sigma_y() { return (Eigen::Matrix2cd() << 0, -I, I, 0).finished(); }
inline Eigen::Matrix2cd sigma_z() { return (Eigen::Matrix2cd() << 1, 0, 0, -1).finished(); }

inline Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

/// Gamma_g (gain) / Gamma_l (loss) = -1 (x) sigma_y +- sigma_y (x) (i sigma_x + sigma_z).
inline Eigen::Matrix4cd gamma_block(bool gain) {
  const Eigen::Matrix2cd one = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix4cd base = -kron(one, sigma_y());
  const Eigen::Matrix4cd cross = kron(sigma_y(), I * sigma_x() + sigma_z());
  return gain ? Eigen::Matrix4cd(base + cross) : Eigen::Matrix4cd(base - cross);
}

/// T = -i sigma_y (x) 1.
inline Eigen::Matrix4cd hop_block() { return kron(-I * sigma_y(), Eigen::Matrix2cd::Identity()); }

}  // namespace blocks

/// Banded assembly of the alternating gain/loss shape matrix directly from
/// its 4 x 4 site blocks: (gamma/2) Gamma_g or Gamma_l on the diagonal and
/// -(t_ab/2) T for every bond a-b. Independent of shape_matrix_from; used to
/// cross-check it.
inline MatrixXcd assemble_u2_banded(const ModelConfig& c, const DisorderRealization* disorder = nullptr) {
  if (c.pattern != Pattern::u2) throw std::invalid_argument("banded assembly needs pattern U2");
  const MatrixXd h = hopping_matrix(c, disorder);
  const int n = c.n;
  MatrixXcd a = MatrixXcd::Zero(4 * n, 4 * n);
  const Eigen::Matrix4cd t = blocks::hop_block();
  for (int s = 0; s < n; ++s) {
    a.block<4, 4>(4 * s, 4 * s) = 0.5 * c.gamma * blocks::gamma_block(s % 2 == 0);
    for (int r = 0; r < n; ++r)
      if (r != s && h(s, r) != 0.0) a.block<4, 4>(4 * s, 4 * r) = 0.5 * h(s, r) * t;
  }
  return a;
}

/// 8 x 8 Bloch Liouvillean of the alternating gain/loss ring:
/// (1/2) [[gamma Gamma_g, -(t1 + t2 e^{ik}) T], [-(t1 + t2 e^{-ik}) T, gamma Gamma_l]].
inline MatrixXcd build_bloch_liouvillean(const ModelConfig& c, double k) {
  if (c.pattern != Pattern::u2) throw std::invalid_argument("Bloch Liouvillean requires pattern U2");
  if (c.boundary != Boundary::periodic) throw std::invalid_argument("Bloch Liouvillean requires a periodic ring");
  const auto [t1, t2] = hopping_amplitudes(c);
  const Eigen::Matrix4cd t = blocks::hop_block();
  MatrixXcd b(8, 8);
  b.block<4, 4>(0, 0) = c.gamma * blocks::gamma_block(true);
  b.block<4, 4>(4, 4) = c.gamma * blocks::gamma_block(false);
  b.block<4, 4>(0, 4) = -(t1 + t2 * std::exp(I * k)) * t;
  b.block<4, 4>(4, 0) = -(t1 + t2 * std::exp(-I * k)) * t;
  return 0.5 * b;
}

struct RapiditySpectrum {
  std::vector<cplx> betas;              // 2n values, Re >= 0, (Re, Im) sorted
  std::vector<cplx> eigenvalues;        // all 4n eigenvalues of A
  std::vector<std::array<int, 2>> pairing_certificate;  // per beta: indices of beta and -beta in eigenvalues
  std::vector<int> degeneracy_id;       // equal ids for coinciding betas
  double pairing_error = 0.0;           // max |lambda + partner|
  double min_re = 0.0;
  bool unique_ness = false;
};

struct PairingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Splits the eigenvalues of A into +-beta pairs (greedy nearest partner,
/// bijection verified) and keeps the member with Re >= 0 (Im >= 0 on ties).
inline RapiditySpectrum rapidities_from_eigenvalues(const std::vector<cplx>& ev, double scale,
                                                   double pair_tol = 1e-8, double unique_tol = 1e-10) {
  const double tol = pair_tol * std::max(1.0, scale);
  RapiditySpectrum r;
  r.eigenvalues = ev;
  const int m = static_cast<int>(ev.size());
  if (m % 2 != 0) throw PairingError("odd number of shape-matrix eigenvalues");
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  // Most positive real parts first so every pair is seeded from its beta member.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (ev[a].real() != ev[b].real()) return ev[a].real() > ev[b].real();
    return ev[a].imag() > ev[b].imag();
  });
  std::vector<char> used(m, 0);
  std::vector<std::pair<cplx, std::array<int, 2>>> pairs;
  for (int a : order) {
    if (used[a]) continue;
    used[a] = 1;
    int best = -1;
    double dbest = std::numeric_limits<double>::infinity();
    for (int b = 0; b < m; ++b) {
      if (used[b]) continue;
      const double d = std::abs(ev[a] + ev[b]);
      if (d < dbest) {
        dbest = d;
        best = b;
      }
    }
    if (best < 0 || dbest > tol)
      throw PairingError("eigenvalue " + std::to_string(ev[a].real()) + std::string(ev[a].imag() < 0 ? "" : "+") +
                         std::to_string(ev[a].imag()) + "i has no -beta partner within tolerance");
    used[best] = 1;
    r.pairing_error = std::max(r.pairing_error, dbest);
    const bool a_is_beta = ev[a].real() > ev[best].real() ||
                           (ev[a].real() == ev[best].real() && ev[a].imag() >= ev[best].imag());
    const int beta = a_is_beta ? a : best;
    const int partner = a_is_beta ? best : a;
    cplx b = ev[beta];
    if (b.real() < 0.0) b = -ev[partner];  // both ~0 in real part
    pairs.push_back({b, {beta, partner}});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return lex_less(x.first, y.first); });
  r.min_re = std::numeric_limits<double>::infinity();
  for (const auto& [b, cert] : pairs) {
    r.betas.push_back(b);
    r.pairing_certificate.push_back(cert);
    r.min_re = std::min(r.min_re, b.real());
  }
  // Degeneracy ids: connected components of |beta_i - beta_j| <= tol.
  const int nb = static_cast<int>(r.betas.size());
  r.degeneracy_id.assign(nb, -1);
  int next = 0;
  for (int i = 0; i < nb; ++i) {
    if (r.degeneracy_id[i] >= 0) continue;
    std::vector<int> stack{i};
    r.degeneracy_id[i] = next;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < nb; ++v)
        if (r.degeneracy_id[v] < 0 && std::abs(r.betas[u] - r.betas[v]) <= tol) {
          r.degeneracy_id[v] = next;
          stack.push_back(v);
        }
    }
    ++next;
  }
  r.unique_ness = r.min_re > unique_tol * std::max(1.0, scale);
  return r;
}

inline RapiditySpectrum rapidities(const ShapeMatrix& s, double pair_tol = 1e-8) {
  Eigen::ComplexEigenSolver<MatrixXcd> es(s.entries, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("shape-matrix eigensolver failed");
  const double scale = s.entries.cwiseAbs().colwise().sum().maxCoeff();
  return rapidities_from_eigenvalues(to_vector(es.eigenvalues()), scale, pair_tol);
}

/// Momenta 2 pi m / (n/2), m = 0..n/2-1, of a ring with n/2 unit cells.
inline std::vector<double> ring_momenta(int n_cells) {
  std::vector<double> k;
  for (int m = 0; m < n_cells; ++m) k.push_back(2.0 * pi * m / n_cells);
  return k;
}

/// Closed-form rapidities (gamma +- i E(k)) / 2 of the alternating gain/loss
/// ring, E(k) the Hermitian SSH band energy; every value appears twice.
inline std::vector<cplx> analytic_rapidities_u2_ring(const ModelConfig& c) {
  if (c.pattern != Pattern::u2 || c.boundary != Boundary::periodic)
    throw std::invalid_argument("closed form holds for the periodic U2 ring only");
  ModelConfig herm = c;
  herm.pattern = Pattern::none;
  herm.gamma = 0.0;
  std::vector<cplx> out;
  for (double k : ring_momenta(c.cells())) {
    const double e = bloch_band_energies(herm, k).first.real();
    for (double sign : {1.0, -1.0})
      for (int rep = 0; rep < 2; ++rep) out.push_back(0.5 * (c.gamma + sign * I * e));
  }
  std::stable_sort(out.begin(), out.end(), lex_less);
  return out;
}

/// Covariance C_mn = <c_m^dag c_n> of the steady state.
struct CovarianceMatrix {
  MatrixXcd entries;
};

/// Coefficients of dC/dt = -(X C + C X^dag) + 2 G for a quadratic model with
/// single-particle Hamiltonian h and single-site channels.
struct CovarianceGenerator {
  MatrixXcd x;
  MatrixXcd g2;  // 2 G
};

inline CovarianceGenerator covariance_generator(const MatrixXcd& h, const std::vector<Channel>& channels) {
  const auto n = h.rows();
  CovarianceGenerator gen;
  MatrixXcd d = MatrixXcd::Zero(n, n);
  gen.g2 = MatrixXcd::Zero(n, n);
  for (const Channel& ch : channels) {
    d(ch.site, ch.site) += ch.rate;
    if (ch.gain) gen.g2(ch.site, ch.site) += 2.0 * ch.rate;
  }
  gen.x = d - I * h.transpose();
  return gen;
}

/// Steady state of the covariance dynamics; throws NonUniqueError when the
/// stationary equation is singular (e.g. no dissipation).
inline CovarianceMatrix ness_covariance_from(const MatrixXcd& h, const std::vector<Channel>& channels) {
  const CovarianceGenerator gen = covariance_generator(h, channels);
  CovarianceMatrix c;
  c.entries = solve_lyapunov(gen.x, gen.g2);
  return c;
}

inline CovarianceMatrix ness_covariance(const ModelConfig& c, const DisorderRealization* disorder = nullptr) {
  if (c.pattern == Pattern::none || c.gamma <= 0.0)
    throw NonUniqueError("NESS is not unique without dissipation (gamma = 0 or pattern none)");
  return ness_covariance_from(hopping_matrix(c, disorder).cast<cplx>(), dissipation_channels(c));
}

inline OccupationProfile ness_occupation(const CovarianceMatrix& c, double tol = 1e-8) {
  OccupationProfile p;
  for (Eigen::Index i = 0; i < c.entries.rows(); ++i) {
    const cplx v = c.entries(i, i);
    p.values.push_back(v.real());
    if (std::abs(v.imag()) > tol) p.imaginary_part = true;
    if (v.real() < -tol || v.real() > 1.0 + tol) p.out_of_range = true;
  }
  return p;
}

}  // namespace dssh
