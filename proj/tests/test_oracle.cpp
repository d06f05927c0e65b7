#include <gtest/gtest.h>

#include <random>

#include <dssh/oracle.hpp>
#include <dssh/third_quant.hpp>
#include <dssh/validation.hpp>

using namespace dssh;

namespace {

ModelConfig make(int n, double theta, double gamma, Pattern p, Boundary b) {
  ModelConfig c;
  c.n = n;
  c.theta = theta;
  c.gamma = gamma;
  c.pattern = p;
  c.boundary = b;
  return c;
}

MatrixXcd random_density_matrix(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXcd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
  MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST(Fock, CanonicalAnticommutation) {
  FockSpace fs(3);
  const MatrixXcd id = MatrixXcd::Identity(8, 8);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const MatrixXcd ca = MatrixXcd(fs.annihilator(a)), cb = MatrixXcd(fs.annihilator(b));
      const MatrixXcd cbd = MatrixXcd(fs.creator(b));
      EXPECT_LT((ca * cbd + cbd * ca - (a == b ? id : MatrixXcd::Zero(8, 8))).cwiseAbs().maxCoeff(), 1e-15);
      EXPECT_LT((ca * cb + cb * ca).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Fock, QuadraticSpectrumIsSumOfSingleParticleEnergies) {
  const ModelConfig c = make(4, 0.7, 0.0, Pattern::none, Boundary::open);
  const MatrixXcd h = MatrixXcd(FockSpace(4).quadratic(hopping_matrix(c).cast<cplx>()));
  Eigen::SelfAdjointEigenSolver<MatrixXcd> many(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> single(hopping_matrix(c));
  std::vector<double> sums;
  for (int s = 0; s < 16; ++s) {
    double e = 0;
    for (int m = 0; m < 4; ++m)
      if ((s >> m) & 1) e += single.eigenvalues()(m);
    sums.push_back(e);
  }
  std::sort(sums.begin(), sums.end());
  for (int s = 0; s < 16; ++s) EXPECT_NEAR(many.eigenvalues()(s), sums[s], 1e-12);
}

TEST(Fock, EffectiveHamiltonianCarriesPotential) {
  const ModelConfig c = make(2, pi / 3, 0.5, Pattern::u2, Boundary::open);
  const MatrixXcd h = fock_hamiltonian(c);
  // |11>: both sites occupied, potentials +i gamma and -i gamma cancel
  EXPECT_LT(std::abs(h(3, 3)), 1e-15);
  EXPECT_LT(std::abs(h(1, 1) - cplx(0, 0.5)), 1e-15);
}

TEST(Superoperator, VectorizationConventionMatchesMasterEquation) {
  std::mt19937_64 rng(17);
  for (Pattern p : {Pattern::u1, Pattern::u2}) {
    const ModelConfig c = make(p == Pattern::u1 ? 2 : 4, pi / 3, 0.7, p, Boundary::open);
    const QuadraticModel model = QuadraticModel::from_config(c);
    const Superoperator s = build_superoperator(model);
    const MatrixXcd rho = random_density_matrix(s.hilbert_dim, rng);
    const VectorXcd lhs = s.matrix * vec(rho);
    const MatrixXcd rhs = apply_master_equation(model, rho);
    EXPECT_LT((unvec(lhs, s.hilbert_dim) - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Superoperator, TracePreserving) {
  const Superoperator s = dense_liouvillean(make(4, pi / 3, 0.9, Pattern::u2, Boundary::periodic));
  const VectorXcd id = vec(MatrixXcd::Identity(s.hilbert_dim, s.hilbert_dim));
  const VectorXcd left = MatrixXcd(s.matrix).adjoint() * id;
  EXPECT_LT(left.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Superoperator, SpectrumIsBuiltFromRapidities) {
  // Liouvillean eigenvalues are -2 sum_j nu_j beta_j, nu_j in {0, 1}.
  const ModelConfig c = make(2, pi / 3, 0.6, Pattern::u1, Boundary::open);
  const auto betas = rapidities(build_shape_matrix(c)).betas;
  std::vector<cplx> predicted;
  for (std::uint64_t mask = 0; mask < (1u << betas.size()); ++mask) {
    cplx v = 0;
    for (std::size_t j = 0; j < betas.size(); ++j)
      if ((mask >> j) & 1) v -= 2.0 * betas[j];
    predicted.push_back(v);
  }
  Eigen::ComplexEigenSolver<MatrixXcd> es(MatrixXcd(dense_liouvillean(c).matrix), false);
  EXPECT_LT(multiset_distance(predicted, to_vector(es.eigenvalues())), 1e-9);
}

TEST(SteadyState, UniqueStateIsPhysical) {
  const SteadyState ss = oracle_steady_state(dense_liouvillean(make(4, pi / 3, 1.4, Pattern::u2, Boundary::open)));
  EXPECT_EQ(ss.kernel_dimension, 1);
  EXPECT_LT(ss.residual, 1e-10);
  EXPECT_NEAR(ss.state.rho.trace().real(), 1.0, 1e-12);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(ss.state.rho);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12);
}

TEST(SteadyState, NoDissipationIsNotUnique) {
  EXPECT_THROW(oracle_steady_state(dense_liouvillean(make(4, pi / 3, 0.0, Pattern::u2, Boundary::open))),
               NonUniqueError);
  EXPECT_THROW(oracle_steady_state(dense_liouvillean(make(2, pi / 3, 0.5, Pattern::none, Boundary::open))),
               NonUniqueError);
}

TEST(SteadyState, SizeGuard) { EXPECT_THROW(dense_liouvillean(make(8, pi / 3, 0.5, Pattern::u2, Boundary::open)), std::invalid_argument); }

TEST(Dynamics, SingleSiteLossDecaysAtTwiceGamma) {
  for (double gamma : {0.25, 1.0, 2.5}) EXPECT_LT(validation::decay_convention_residual(gamma), 1e-8);
}

TEST(Dynamics, TrajectoryPreservesTraceAndRelaxes) {
  const ModelConfig c = make(4, pi / 3, 0.5, Pattern::u2, Boundary::open);
  const double min_re = rapidities(build_shape_matrix(c)).min_re;
  const double T = 12.0 / (2.0 * min_re);
  const Trajectory traj = oracle_time_evolution(dense_liouvillean(c), basis_state(4, 0), T, 240);
  EXPECT_LT(traj.max_trace_error, 1e-10);
  EXPECT_LT(traj.max_hermiticity_error, 1e-10);
  EXPECT_LT(traj.distance.back(), traj.distance.front() * 1e-4);
  EXPECT_GE(traj.fitted_rate, 0.99 * 2.0 * min_re);
  // final occupations approach the covariance steady state
  const OccupationProfile ness = ness_occupation(ness_covariance(c));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(traj.occupations.back()[i], ness.values[i], 1e-4);
}

TEST(Dynamics, FitRecoversExponential) {
  std::vector<double> t, d;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.1 * i);
    d.push_back(3.0 * std::exp(-0.7 * t.back()));
  }
  const auto [rate, points] = fit_decay_rate(t, d, 5.0);
  EXPECT_NEAR(rate, 0.7, 1e-12);
  EXPECT_EQ(points, 51);
}

TEST(Validation, AllChecksPass) {
  ValidationOptions opt;
  opt.oracle_sizes = {2, 4};
  const auto results = run_validation(opt);
  EXPECT_GE(results.size(), 10u);
  for (const CheckResult& r : results) EXPECT_TRUE(r.passed) << r.name << " residual " << r.max_residual;
}

TEST(Validation, InjectedCovarianceFaultIsCaught) {
  ValidationOptions opt;
  opt.oracle_sizes = {2, 4};
  opt.flip_covariance_sign = true;
  bool caught = false;
  for (const CheckResult& r : run_validation(opt))
    if (r.name == "ness_covariance_vs_oracle") caught = !r.passed;
  EXPECT_TRUE(caught);
}
