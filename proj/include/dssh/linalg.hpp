#pragma once

// Dense complex linear algebra shared by the spectral modules: biorthogonal
// eigendecomposition, a Bartels-Stewart solver for X C + C X^dag = F, and
// tolerance-based multiset comparison of spectra.

#include <algorithm>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dssh {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr cplx I{0.0, 1.0};

/// Steady state or Lyapunov solution is not unique (singular coefficient operator).
struct NonUniqueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two bands (or a tracked band and another eigenvalue) touch.
struct GaplessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Left and right eigenvectors are (nearly) self-orthogonal: exceptional point.
struct DefectiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tracked band jumps between neighbouring k points.
struct ContinuityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Eigenpairs of a general complex matrix with biorthonormal left vectors.
///
/// Right vectors are the columns of `right` (unit Euclidean norm); left
/// vectors are the rows of `left` = right^{-1}, so left * right = 1. For a
/// Hermitian input a unitary basis is used and left = right^dag exactly.
struct Eigensystem {
  VectorXcd values;
  MatrixXcd right;
  MatrixXcd left;
  VectorXd condition;  // ||chi_m|| ||phi_m|| / |<chi_m|phi_m>| per mode (1 for normal matrices)
};

inline bool is_hermitian(const MatrixXcd& a, double rel_tol = 1e-14) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

inline Eigensystem eig(const MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eig: matrix must be square");
  Eigensystem out;
  const auto n = a.rows();
  if (is_hermitian(a)) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (a + a.adjoint()));
    if (es.info() != Eigen::Success) throw std::runtime_error("eig: Hermitian solver failed");
    out.values = es.eigenvalues().cast<cplx>();
    out.right = es.eigenvectors();
    out.left = out.right.adjoint();
    out.condition = VectorXd::Ones(n);
    return out;
  }
  Eigen::ComplexEigenSolver<MatrixXcd> es(a, true);
  if (es.info() != Eigen::Success) throw std::runtime_error("eig: complex solver failed");
  out.values = es.eigenvalues();
  out.right = es.eigenvectors();
  for (Eigen::Index m = 0; m < n; ++m) out.right.col(m).normalize();
  Eigen::PartialPivLU<MatrixXcd> lu(out.right);
  out.left = lu.inverse();
  out.condition.resize(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const double c = out.left.row(m).norm();
    out.condition(m) = std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
  }
  return out;
}

/// Lexicographic (Re, Im) order used for reproducible spectrum output.
inline bool lex_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

/// Permutes an eigensystem so that eigenvalues are in (Re, Im) order.
inline void sort_lexicographic(Eigensystem& es) {
  const auto n = es.values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto i, auto j) { return lex_less(es.values(i), es.values(j)); });
  Eigensystem s;
  s.values.resize(n);
  s.right.resize(es.right.rows(), n);
  s.left.resize(n, es.left.cols());
  s.condition.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.values(i) = es.values(order[i]);
    s.right.col(i) = es.right.col(order[i]);
    s.left.row(i) = es.left.row(order[i]);
    s.condition(i) = es.condition(order[i]);
  }
  es = std::move(s);
}

/// Largest distance of an optimal-by-greedy one-to-one matching between two
/// equally sized multisets of complex numbers (infinity if sizes differ).
///
/// Each element of `a` in turn claims its nearest unclaimed element of `b`;
/// for well-separated clusters this is the exact bottleneck distance.
inline double multiset_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<char> used(b.size(), 0);
  double worst = 0.0;
  for (const cplx& x : a) {
    std::size_t best = b.size();
    double dbest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(x - b[j]);
      if (d < dbest) {
        dbest = d;
        best = j;
      }
    }
    used[best] = 1;
    worst = std::max(worst, dbest);
  }
  return worst;
}

inline std::vector<cplx> to_vector(const VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

/// Solves X C + C X^dag = F for C by Bartels-Stewart on the complex Schur form.
///
/// Throws NonUniqueError when some pair of eigenvalues satisfies
/// lambda_i + conj(lambda_j) ~ 0 (the linear operator is singular).
inline MatrixXcd solve_lyapunov(const MatrixXcd& x, const MatrixXcd& f, double rel_tol = 1e-10) {
  const auto n = x.rows();
  if (x.cols() != n || f.rows() != n || f.cols() != n)
    throw std::invalid_argument("solve_lyapunov: dimension mismatch");
  Eigen::ComplexSchur<MatrixXcd> schur(x);
  if (schur.info() != Eigen::Success) throw std::runtime_error("solve_lyapunov: Schur failed");
  const MatrixXcd& u = schur.matrixU();
  const MatrixXcd& t = schur.matrixT();
  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  const MatrixXcd ft = u.adjoint() * f * u;

  // T Y + Y T^dag = Ft; column j couples to columns i > j through (T^dag)_{ij} = conj(T_ji).
  MatrixXcd y = MatrixXcd::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    VectorXcd rhs = ft.col(j);
    for (Eigen::Index i = j + 1; i < n; ++i) rhs -= std::conj(t(j, i)) * y.col(i);
    MatrixXcd m = t;
    const cplx shift = std::conj(t(j, j));
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) += shift;
      if (std::abs(m(i, i)) < rel_tol * scale)
        throw NonUniqueError("Lyapunov operator is singular: eigenvalues " + std::to_string(i) + " and " +
                             std::to_string(j) + " satisfy lambda_i + conj(lambda_j) = 0");
    }
    y.col(j) = m.triangularView<Eigen::Upper>().solve(rhs);
  }
  return u * y * u.adjoint();
}

/// Reference solver for X C + C X^dag = F via the n^2 x n^2 Kronecker system.
/// Only meant for small n (cross-checks of solve_lyapunov).
inline MatrixXcd solve_lyapunov_kronecker(const MatrixXcd& x, const MatrixXcd& f) {
  const auto n = x.rows();
  const auto n2 = n * n;
  // vec(X C) = (1 (x) X) vec C, vec(C X^dag) = (conj(X) (x) 1) vec C with column stacking.
  MatrixXcd k = MatrixXcd::Zero(n2, n2);
  const MatrixXcd xc = x.conjugate();
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = 0; a < n; ++a) {
      k.block(b * n, b * n, n, n) += (a == b ? 1.0 : 0.0) * x;
      k.block(a * n, b * n, n, n) += xc(a, b) * MatrixXcd::Identity(n, n);
    }
  const VectorXcd rhs = Eigen::Map<const VectorXcd>(f.data(), n2);
  Eigen::FullPivLU<MatrixXcd> lu(k);
  if (!lu.isInvertible()) throw NonUniqueError("Lyapunov operator is singular");
  VectorXcd sol = lu.solve(rhs);
  return Eigen::Map<MatrixXcd>(sol.data(), n, n);
}

}  // namespace dssh
