#pragma once

// Cross-validation suite behind `dssh validate`: every derived convention is
// checked against an independent construction (Fock-space oracle, banded
// block assembly, closed forms) and reported with its worst residual.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "effective.hpp"
#include "io.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "oracle.hpp"
#include "third_quant.hpp"
#include "zak.hpp"

namespace dssh {

struct CheckResult {
  std::string name;
  bool passed = false;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationOptions {
  bool flip_covariance_sign = false;  // fault injection: must make the oracle-equivalence check fail
  std::vector<int> oracle_sizes{2, 4, 6};
  int nk = default_nk;
};

namespace validation {

inline ModelConfig chain(int n, double theta, double gamma, Pattern p, Boundary b) {
  ModelConfig c;
  c.n = n;
  c.theta = theta;
  c.gamma = gamma;
  c.pattern = p;
  c.boundary = b;
  return c;
}

inline CheckResult make(std::string name, double residual, double tol, std::string detail = {}) {
  return {std::move(name), residual <= tol, residual, tol, std::move(detail)};
}

/// Majorana coefficient matrix rebuilt in Fock space equals the direct
/// many-body Hamiltonian up to a multiple of the identity.
inline double majorana_rebuild_residual(const ModelConfig& c) {
  const MatrixXcd direct = MatrixXcd(FockSpace(c.n).quadratic(hopping_matrix(c).cast<cplx>()));
  MatrixXcd diff = fock_from_majorana(majorana_hamiltonian(c)) - direct;
  const cplx shift = diff.trace() / static_cast<double>(diff.rows());
  diff.diagonal().array() -= shift;
  return diff.cwiseAbs().maxCoeff();
}

/// sum_j l_j w_j rebuilt in Fock space equals sqrt(gamma) c or sqrt(gamma) c^dag.
inline double lindblad_rebuild_residual(const ModelConfig& c) {
  FockSpace fs(c.n);
  const auto ls = lindblad_vectors(c);
  const auto channels = dissipation_channels(c);
  double worst = 0.0;
  for (int site = 0; site < c.n; ++site) {
    MatrixXcd rebuilt = MatrixXcd::Zero(fs.dim(), fs.dim());
    for (int m = 0; m < c.n; ++m) {
      const MatrixXcd cm = MatrixXcd(fs.annihilator(m)), cd = MatrixXcd(fs.creator(m));
      rebuilt += ls[site](2 * m) * (cm + cd) + ls[site](2 * m + 1) * (I * (cm - cd));
    }
    MatrixXcd expected = MatrixXcd::Zero(fs.dim(), fs.dim());
    for (const Channel& ch : channels)
      if (ch.site == site)
        expected = std::sqrt(ch.rate) * MatrixXcd(ch.gain ? fs.creator(site) : fs.annihilator(site));
    worst = std::max(worst, (rebuilt - expected).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Block-diagonalizes the ring shape matrix with cell plane waves e^{-ikj}
/// and compares each 8 x 8 block with the Bloch Liouvillean; also returns the
/// largest coupling between different momenta.
inline double fourier_residual(const ModelConfig& c) {
  const MatrixXcd a = build_shape_matrix(c).entries;
  const int cells = c.cells();
  const auto ks = ring_momenta(cells);
  auto basis = [&](double k) {
    MatrixXcd u = MatrixXcd::Zero(4 * c.n, 8);
    for (int j = 0; j < cells; ++j)
      u.block(8 * j, 0, 8, 8) = std::exp(-I * k * static_cast<double>(j)) / std::sqrt(cells) * MatrixXcd::Identity(8, 8);
    return u;
  };
  double worst = 0.0;
  for (double k : ks) {
    const MatrixXcd uk = basis(k);
    worst = std::max(worst, (uk.adjoint() * a * uk - build_bloch_liouvillean(c, k)).cwiseAbs().maxCoeff());
    for (double q : ks)
      if (q != k) worst = std::max(worst, (basis(q).adjoint() * a * uk).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Liouvillean eigenvalues -2 sum_j nu_j beta_j (nu_j in {0, 1}) from the
/// rapidities versus the brute-force superoperator spectrum.
inline double rapidity_superoperator_residual(const ModelConfig& c) {
  const auto r = rapidities(build_shape_matrix(c));
  std::vector<cplx> predicted;
  const std::size_t m = r.betas.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (mask >> j & 1) s += r.betas[j];
    predicted.push_back(-2.0 * s);
  }
  const MatrixXcd l = MatrixXcd(dense_liouvillean(c).matrix);
  Eigen::ComplexEigenSolver<MatrixXcd> es(l, false);
  return multiset_distance(predicted, to_vector(es.eigenvalues()));
}

/// Max |covariance occupation - oracle occupation| and the oracle residual.
inline std::pair<double, double> covariance_oracle_residual(const ModelConfig& c, bool flip_sign) {
  MatrixXcd h = hopping_matrix(c).cast<cplx>();
  const auto channels = dissipation_channels(c);
  CovarianceGenerator gen = covariance_generator(h, channels);
  // Fault injection flips the damping sign (X = -D - i h^T). Flipping only the
  // Hamiltonian sign would go unnoticed: for real h it yields conj(C), whose
  // diagonal is unchanged.
  if (flip_sign)
    for (const Channel& ch : channels) gen.x(ch.site, ch.site) -= 2.0 * ch.rate;
  const MatrixXcd cov = solve_lyapunov(gen.x, gen.g2);
  const SteadyState ss = oracle_steady_state(dense_liouvillean(c));
  const auto occ = site_occupations(ss.state.rho, c.n);
  double worst = 0.0;
  for (int i = 0; i < c.n; ++i) worst = std::max(worst, std::abs(cov(i, i) - occ[i]));
  return {worst, ss.residual};
}

/// Single lossy site relaxing from the filled state: max |n(t) - e^{-2 gamma t}| over [0, 3/gamma].
inline double decay_convention_residual(double gamma) {
  QuadraticModel m{1, MatrixXcd::Zero(1, 1), {{0, false, gamma}}};
  const Superoperator s = build_superoperator(m);
  const int steps = 300;
  const double T = 3.0 / gamma;
  const VectorXcd v0 = vec(basis_state(1, 1).rho);
  double worst = 0.0;
  VectorXcd v = v0;
  const MatrixXcd prop = (MatrixXcd(s.matrix) * (T / steps)).exp();
  for (int k = 0; k <= steps; ++k) {
    const double t = k * T / steps;
    worst = std::max(worst, std::abs(v(3).real() - std::exp(-2.0 * gamma * t)));
    v = prop * v;
  }
  return worst;
}

}  // namespace validation

inline std::vector<CheckResult> run_validation(const ValidationOptions& opt = {}) {
  using namespace validation;
  std::vector<CheckResult> out;

  {
    double w = 0.0;
    for (int n : {2, 4})
      for (double th : {pi / 3, 2 * pi / 3}) w = std::max(w, majorana_rebuild_residual(chain(n, th, 0.0, Pattern::none, Boundary::open)));
    w = std::max(w, majorana_rebuild_residual(chain(4, pi / 5, 0.0, Pattern::none, Boundary::periodic)));
    out.push_back(make("majorana_hamiltonian_fock_rebuild", w, 1e-12));
  }
  {
    double w = 0.0;
    for (Pattern p : {Pattern::u1, Pattern::u2})
      w = std::max(w, lindblad_rebuild_residual(chain(4, pi / 3, 0.7, p, Boundary::open)));
    out.push_back(make("lindblad_vectors_fock_rebuild", w, 1e-12));
  }
  {
    double w = 0.0;
    for (int n : {4, 8})
      for (double th : {pi / 6, 2 * pi / 3}) {
        const ModelConfig c = chain(n, th, 0.8, Pattern::u2, Boundary::periodic);
        w = std::max(w, (build_shape_matrix(c).entries - assemble_u2_banded(c)).cwiseAbs().maxCoeff());
      }
    out.push_back(make("shape_matrix_vs_banded_blocks", w, 1e-12));
  }
  {
    double w = 0.0;
    for (int n : {8, 16}) w = std::max(w, fourier_residual(chain(n, pi / 3, 0.9, Pattern::u2, Boundary::periodic)));
    out.push_back(make("bloch_liouvillean_vs_fourier_blocks", w, 1e-10));
  }
  {
    double w = 0.0;
    for (double th : {pi / 6, pi / 3, 2 * pi / 3})
      for (double g : {0.5, 1.0, 2.0}) {
        const ModelConfig c = chain(32, th, g, Pattern::u2, Boundary::periodic);
        w = std::max(w, multiset_distance(rapidities(build_shape_matrix(c)).betas, analytic_rapidities_u2_ring(c)));
      }
    out.push_back(make("rapidities_vs_closed_form", w, 1e-9));
  }
  {
    double w = 0.0;
    for (Pattern p : {Pattern::u1, Pattern::u2})
      for (int n : {2, 4}) w = std::max(w, rapidity_superoperator_residual(chain(n, pi / 3, 0.6, p, Boundary::open)));
    out.push_back(make("rapidities_vs_superoperator_spectrum", w, 1e-9));
  }
  {
    double w = 0.0, res = 0.0;
    std::string detail;
    for (int n : opt.oracle_sizes)
      for (auto [p, b] : {std::pair{Pattern::u1, Boundary::open}, std::pair{Pattern::u2, Boundary::open},
                          std::pair{Pattern::u2, Boundary::periodic}})
        for (double g : {0.5, 1.4, 2.5}) {
          const auto [d, r] = covariance_oracle_residual(chain(n, pi / 3, g, p, b), opt.flip_covariance_sign);
          w = std::max(w, d);
          res = std::max(res, r);
        }
    detail = "oracle residual " + format_double(res);
    out.push_back(make("ness_covariance_vs_oracle", w, 1e-8, detail));
    out.push_back(make("oracle_ness_residual", res, 1e-10));
  }
  {
    double w = 0.0;
    for (double g : {0.5, 1.0, 2.5}) w = std::max(w, validation::decay_convention_residual(g));
    out.push_back(make("single_site_decay_rate_2gamma", w, 1e-8));
  }
  {
    double w = 0.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> th(0.05, pi - 0.05), ga(0.0, 2.0);
    for (int trial = 0; trial < 5; ++trial)
      for (Pattern p : {Pattern::u1, Pattern::u2}) {
        const ModelConfig c = chain(64, th(rng), ga(rng), p, Boundary::open);
        const SpectrumResult s = complex_spectrum(build_real_space_hamiltonian(c));
        w = std::max(w, lambda_pairing_error(s));
      }
    out.push_back(make("lambda_spectral_pairing", w, 1e-10));
  }
  {
    double w = 0.0;
    int cells = 0, wrong = 0;
    ModelConfig tmpl = chain(64, pi / 3, 0.0, Pattern::u2, Boundary::periodic);
    for (int i = 1; i <= 7; ++i)
      for (int j = 0; j < 7; ++j) {
        const double th = pi * i / 8.0, g = 1.4 * j / 6.0;
        const PhaseCell cell = zak_cell(tmpl, th, g, ZakSource::effective, opt.nk);
        if (cell.zak.real_class == ZakClass::undefined_broken || cell.zak.real_class == ZakClass::undefined_gapless)
          continue;
        ++cells;
        const double target = th < pi / 2 ? pi : 0.0;
        double r = std::fmod(cell.zak.nu.real(), 2 * pi);
        if (r < 0) r += 2 * pi;
        w = std::max(w, std::min(std::abs(r - target), 2 * pi - std::abs(r - target)));
        if (th != pi / 2 && cell.zak.real_class != (th < pi / 2 ? ZakClass::pi : ZakClass::zero)) ++wrong;
      }
    if (cells == 0) wrong = 1;
    out.push_back(make("zak_quantization_grid", wrong ? std::max(w, 1.0) : w, 1e-6,
                       std::to_string(cells) + " unbroken cells"));
  }
  return out;
}

}  // namespace dssh
