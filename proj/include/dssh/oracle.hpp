#pragma once

// Brute-force Fock-space ground truth for small chains: Jordan-Wigner
// fermion operators, many-body Hamiltonians, the full Lindblad superoperator
// on column-stacked density matrices, its steady state and time evolution.
//
// Basis: bit m of a Fock index is the occupation of site m; c_m carries the
// Jordan-Wigner string (-1)^(number of occupied sites below m).
// Vectorization: vec(rho)[i + j*D] = rho(i, j), so vec(A X B) = (B^T (x) A) vec(X).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "effective.hpp"
#include "linalg.hpp"
#include "model.hpp"

namespace dssh {

using SparseC = Eigen::SparseMatrix<cplx>;

/// Quadratic open system: Hermitian hopping h plus single-site gain/loss channels.
struct QuadraticModel {
  int n = 0;
  MatrixXcd h;
  std::vector<Channel> channels;

  static QuadraticModel from_config(const ModelConfig& c, const DisorderRealization* disorder = nullptr) {
    return {c.n, hopping_matrix(c, disorder).cast<cplx>(), dissipation_channels(c)};
  }
};

class FockSpace {
 public:
  explicit FockSpace(int n) : n_(n) {
    if (n < 1 || n > 12) throw std::invalid_argument("FockSpace: unsupported site count");
  }

  int sites() const { return n_; }
  Eigen::Index dim() const { return Eigen::Index{1} << n_; }

  static int count(std::uint64_t s) { return std::popcount(s); }

  /// c_m with the Jordan-Wigner string over sites below m.
  SparseC annihilator(int m) const {
    std::vector<Eigen::Triplet<cplx>> trip;
    const std::uint64_t bit = std::uint64_t{1} << m;
    for (std::uint64_t s = 0; s < static_cast<std::uint64_t>(dim()); ++s) {
      if (!(s & bit)) continue;
      const double sign = (std::popcount(s & (bit - 1)) % 2) ? -1.0 : 1.0;
      trip.emplace_back(static_cast<Eigen::Index>(s ^ bit), static_cast<Eigen::Index>(s), sign);
    }
    SparseC c(dim(), dim());
    c.setFromTriplets(trip.begin(), trip.end());
    return c;
  }

  SparseC creator(int m) const { return SparseC(annihilator(m).adjoint()); }

  /// sum_ab m_ab c_a^dag c_b.
  SparseC quadratic(const MatrixXcd& m) const {
    SparseC out(dim(), dim());
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        if (m(a, b) != cplx(0.0)) out += m(a, b) * SparseC(creator(a) * annihilator(b));
    out.prune(cplx(0.0));
    return out;
  }

  SparseC identity() const {
    SparseC id(dim(), dim());
    id.setIdentity();
    return id;
  }

 private:
  int n_;
};

/// Many-body matrix of the (possibly non-Hermitian) effective Hamiltonian, n <= 8.
inline MatrixXcd fock_hamiltonian(const ModelConfig& c, const DisorderRealization* disorder = nullptr) {
  c.validate();
  if (c.n > 8) throw std::invalid_argument("fock_hamiltonian: n <= 8 required");
  FockSpace fs(c.n);
  return MatrixXcd(fs.quadratic(build_real_space_hamiltonian(c, disorder).entries));
}

/// Many-body operator represented by sum_jk w_j H_jk w_k for a Majorana coefficient matrix.
inline MatrixXcd fock_from_majorana(const MatrixXcd& hm) {
  const int n = static_cast<int>(hm.rows() / 2);
  FockSpace fs(n);
  std::vector<SparseC> w;
  for (int m = 0; m < n; ++m) {
    const SparseC c = fs.annihilator(m), cd = fs.creator(m);
    w.push_back(c + cd);
    w.push_back(I * (c - cd));
  }
  MatrixXcd out = MatrixXcd::Zero(fs.dim(), fs.dim());
  for (int j = 0; j < 2 * n; ++j)
    for (int k = 0; k < 2 * n; ++k)
      if (hm(j, k) != cplx(0.0)) out += hm(j, k) * MatrixXcd(w[j] * w[k]);
  return out;
}

/// Collapse operators sqrt(rate) c_site or sqrt(rate) c_site^dag.
inline std::vector<SparseC> collapse_operators(const FockSpace& fs, const std::vector<Channel>& channels) {
  std::vector<SparseC> out;
  for (const Channel& ch : channels)
    out.push_back(std::sqrt(ch.rate) * (ch.gain ? fs.creator(ch.site) : fs.annihilator(ch.site)));
  return out;
}

/// Lindblad generator on column-stacked density matrices (dimension 4^n, sparse).
struct Superoperator {
  int n = 0;
  Eigen::Index hilbert_dim = 0;
  SparseC matrix;

  Eigen::Index dim() const { return matrix.rows(); }
};

inline Superoperator build_superoperator(const QuadraticModel& model) {
  if (model.n > 6) throw std::invalid_argument("superoperator: n <= 6 required");
  FockSpace fs(model.n);
  const SparseC id = fs.identity();
  const SparseC h = fs.quadratic(model.h);
  SparseC l = SparseC(Eigen::kroneckerProduct(id, h)) - SparseC(Eigen::kroneckerProduct(SparseC(h.transpose()), id));
  l = -I * l;
  for (const SparseC& op : collapse_operators(fs, model.channels)) {
    const SparseC ldl = SparseC(op.adjoint()) * op;
    l += 2.0 * SparseC(Eigen::kroneckerProduct(SparseC(op.conjugate()), op));
    l -= SparseC(Eigen::kroneckerProduct(id, ldl));
    l -= SparseC(Eigen::kroneckerProduct(SparseC(ldl.transpose()), id));
  }
  l.prune(cplx(0.0));
  return {model.n, fs.dim(), l};
}

/// Full Liouvillean of the configured chain with the factor-2 dissipator, n <= 6.
inline Superoperator dense_liouvillean(const ModelConfig& c, const DisorderRealization* disorder = nullptr) {
  c.validate();
  if (c.n > 6) throw std::invalid_argument("dense_liouvillean: n <= 6 required");
  return build_superoperator(QuadraticModel::from_config(c, disorder));
}

/// Right-hand side of the master equation evaluated directly on a matrix.
inline MatrixXcd apply_master_equation(const QuadraticModel& model, const MatrixXcd& rho) {
  FockSpace fs(model.n);
  const MatrixXcd h = MatrixXcd(fs.quadratic(model.h));
  MatrixXcd out = -I * (h * rho - rho * h);
  for (const SparseC& op : collapse_operators(fs, model.channels)) {
    const MatrixXcd l = MatrixXcd(op);
    const MatrixXcd ldl = l.adjoint() * l;
    out += 2.0 * l * rho * l.adjoint() - ldl * rho - rho * ldl;
  }
  return out;
}

inline VectorXcd vec(const MatrixXcd& rho) { return Eigen::Map<const VectorXcd>(rho.data(), rho.size()); }

inline MatrixXcd unvec(const VectorXcd& v, Eigen::Index d) {
  return Eigen::Map<const MatrixXcd>(v.data(), d, d);
}

/// Vectorized indices i + j*D of the block with N(ket i) - N(bra j) = q.
inline std::vector<Eigen::Index> sector_indices(Eigen::Index d, int q) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      if (std::popcount(static_cast<std::uint64_t>(i)) - std::popcount(static_cast<std::uint64_t>(j)) == q)
        idx.push_back(i + j * d);
  return idx;
}

inline MatrixXcd sector_block(const Superoperator& s, const std::vector<Eigen::Index>& idx) {
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(s.dim()), -1);
  for (std::size_t a = 0; a < idx.size(); ++a) pos[idx[a]] = static_cast<Eigen::Index>(a);
  MatrixXcd b = MatrixXcd::Zero(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  for (Eigen::Index col = 0; col < s.matrix.outerSize(); ++col) {
    if (pos[col] < 0) continue;
    for (SparseC::InnerIterator it(s.matrix, col); it; ++it) {
      if (pos[it.row()] < 0)
        throw std::logic_error("superoperator mixes particle-number sectors");
      b(pos[it.row()], pos[col]) = it.value();
    }
  }
  return b;
}

struct DensityMatrix {
  MatrixXcd rho;
};

struct SteadyState {
  DensityMatrix state;
  double residual = 0.0;    // ||L vec(rho)||
  int kernel_dimension = 0; // of the trace-carrying block
};

/// Stationary state from the trace-carrying (N(ket) = N(bra)) block B.
///
/// Trace preservation makes the rows of B belonging to diagonal entries
/// linearly dependent, so replacing the rho(0,0) row by the trace functional
/// gives a system that is invertible exactly when the kernel of B is
/// one-dimensional. A tiny pivot ratio in the LU factors flags a possibly
/// singular system; a rank-revealing factorization of B then decides, and a
/// kernel of dimension > 1 raises NonUniqueError.
inline SteadyState oracle_steady_state(const Superoperator& s, double pivot_threshold = 1e-12) {
  const Eigen::Index d = s.hilbert_dim;
  const auto idx = sector_indices(d, 0);
  MatrixXcd b = sector_block(s, idx);
  const Eigen::Index nb = b.rows();
  MatrixXcd m = b;
  VectorXcd rhs = VectorXcd::Zero(nb);
  Eigen::Index replaced = -1;
  for (Eigen::Index a = 0; a < nb; ++a) {
    const Eigen::Index i = idx[a] % d, j = idx[a] / d;
    if (i == j && replaced < 0) {
      replaced = a;
      m.row(a).setZero();
      rhs(a) = 1.0;
    }
    if (i == j) m(replaced, a) = 1.0;
  }
  SteadyState out;
  Eigen::PartialPivLU<MatrixXcd> lu(m);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const VectorXcd x = lu.solve(rhs);
  if (!(pivots.minCoeff() > pivot_threshold * pivots.maxCoeff()) || !x.allFinite()) {
    Eigen::FullPivLU<MatrixXcd> full(b);
    full.setThreshold(1e-9);
    out.kernel_dimension = static_cast<int>(nb - full.rank());
    if (out.kernel_dimension != 1 || !x.allFinite())
      throw NonUniqueError("steady state is not unique: kernel dimension " + std::to_string(out.kernel_dimension));
  }
  out.kernel_dimension = 1;
  VectorXcd v = VectorXcd::Zero(s.dim());
  for (Eigen::Index a = 0; a < nb; ++a) v(idx[a]) = x(a);
  MatrixXcd rho = unvec(v, d);
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace();
  out.state.rho = rho;
  out.residual = (s.matrix * vec(rho)).norm();
  return out;
}

/// <n_m> = Tr(rho c_m^dag c_m) for every site.
inline std::vector<double> site_occupations(const MatrixXcd& rho, int n) {
  std::vector<double> occ(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index s = 0; s < rho.rows(); ++s)
    for (int m = 0; m < n; ++m)
      if ((s >> m) & 1) occ[m] += rho(s, s).real();
  return occ;
}

inline double trace_distance(const MatrixXcd& a, const MatrixXcd& b) {
  const MatrixXcd d = a - b;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> occupations;  // per time, per site
  std::vector<double> distance;                  // trace distance to the steady state
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double fitted_rate = 0.0;                      // -slope of log(distance) over the tail
  int fit_points = 0;
};

/// Least-squares decay rate of log(distance) over t >= t_min, ignoring values below floor.
inline std::pair<double, int> fit_decay_rate(const std::vector<double>& t, const std::vector<double>& d, double t_min,
                                             double floor = 1e-13) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || !(d[i] > floor)) continue;
    const double y = std::log(d[i]);
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
    ++m;
  }
  if (m < 2) return {0.0, m};
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return {-slope, m};
}

/// Exact stepping rho(t + dt) = exp(L dt) rho(t) with one dense propagator per
/// particle-number-difference sector; records occupations and distance to the NESS.
inline Trajectory oracle_time_evolution(const Superoperator& s, const DensityMatrix& rho0, double T, int steps) {
  if (s.n > 6) throw std::invalid_argument("time evolution: n <= 6 required");
  if (steps < 1 || !(T > 0.0)) throw std::invalid_argument("time evolution: need T > 0 and steps >= 1");
  const Eigen::Index d = s.hilbert_dim;
  const double dt = T / steps;
  const MatrixXcd ness = oracle_steady_state(s).state.rho;

  struct Sector {
    std::vector<Eigen::Index> idx;
    MatrixXcd prop;
  };
  std::vector<Sector> sectors;
  for (int q = -s.n; q <= s.n; ++q) {
    Sector sec{sector_indices(d, q), {}};
    if (sec.idx.empty()) continue;
    sec.prop = (sector_block(s, sec.idx) * dt).exp();
    sectors.push_back(std::move(sec));
  }

  Trajectory traj;
  VectorXcd v = vec(rho0.rho);
  auto record = [&](double t) {
    const MatrixXcd rho = unvec(v, d);
    traj.t.push_back(t);
    traj.occupations.push_back(site_occupations(rho, s.n));
    traj.distance.push_back(trace_distance(rho, ness));
    traj.max_trace_error = std::max(traj.max_trace_error, std::abs(rho.trace() - rho0.rho.trace()));
    traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
  };
  record(0.0);
  for (int step = 1; step <= steps; ++step) {
    VectorXcd next(v.size());
    for (const Sector& sec : sectors) {
      VectorXcd part(static_cast<Eigen::Index>(sec.idx.size()));
      for (std::size_t a = 0; a < sec.idx.size(); ++a) part(a) = v(sec.idx[a]);
      part = sec.prop * part;
      for (std::size_t a = 0; a < sec.idx.size(); ++a) next(sec.idx[a]) = part(a);
    }
    v = next;
    record(step * dt);
  }
  std::tie(traj.fitted_rate, traj.fit_points) = fit_decay_rate(traj.t, traj.distance, 0.5 * T);
  return traj;
}

/// Pure Fock basis state |s><s|.
inline DensityMatrix basis_state(int n, std::uint64_t s) {
  const Eigen::Index d = Eigen::Index{1} << n;
  DensityMatrix r{MatrixXcd::Zero(d, d)};
  r.rho(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = 1.0;
  return r;
}

}  // namespace dssh
