#include <gtest/gtest.h>

#include <random>

#include <dssh/effective.hpp>
#include <dssh/sweeps.hpp>

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

SpectrumResult spectrum(const ModelConfig& c) { return complex_spectrum(build_real_space_hamiltonian(c)); }

}  // namespace

TEST(RealSpace, PotentialPlacement) {
  const VectorXcd u1 = complex_potential(make(6, pi / 3, 0.7, Pattern::u1, Boundary::open));
  EXPECT_EQ(u1(0), cplx(0, -0.7));
  EXPECT_EQ(u1(5), cplx(0, 0.7));
  EXPECT_EQ(u1.segment(1, 4).cwiseAbs().maxCoeff(), 0.0);
  const VectorXcd u2 = complex_potential(make(6, pi / 3, 0.7, Pattern::u2, Boundary::open));
  for (int s = 0; s < 6; ++s) EXPECT_EQ(u2(s), cplx(0, s % 2 == 0 ? 0.7 : -0.7));
}

TEST(RealSpace, PtSymmetricMatrix) {
  // Parity (site reversal) combined with complex conjugation leaves H invariant.
  for (Pattern p : {Pattern::u1, Pattern::u2}) {
    const MatrixXcd h = build_real_space_hamiltonian(make(10, 0.9, 0.6, p, Boundary::open)).entries;
    const MatrixXcd par = h.rowwise().reverse().colwise().reverse();
    EXPECT_LT((par.conjugate() - h).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Bloch, MatchesFourierTransformOfRing) {
  const ModelConfig c = make(16, 0.8, 0.4, Pattern::u2, Boundary::periodic);
  const MatrixXcd h = build_real_space_hamiltonian(c).entries;
  const int cells = c.cells();
  for (int m = 0; m < cells; ++m) {
    const double k = 2 * pi * m / cells;
    MatrixXcd hk = MatrixXcd::Zero(2, 2);
    // H(k)_ab = sum_j H(2*0 + a, 2j + b) e^{-ik j}: translation from cell 0 to cell j
    for (int j = 0; j < cells; ++j)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) hk(a, b) += h(a, 2 * j + b) * std::exp(-I * k * static_cast<double>(j));
    EXPECT_LT((hk - build_bloch_hamiltonian(c, k).entries).cwiseAbs().maxCoeff(), 1e-13) << "k = " << k;
  }
}

TEST(Bloch, ClosedFormEnergies) {
  for (double gamma : {0.0, 0.3, 0.9, 1.7}) {
    const ModelConfig c = make(64, pi / 3, gamma, Pattern::u2, Boundary::periodic);
    for (double k : {0.0, 0.4, 1.9, pi, 5.0}) {
      Eigen::ComplexEigenSolver<MatrixXcd> es(build_bloch_hamiltonian(c, k).entries);
      auto ev = to_vector(es.eigenvalues());
      std::vector<cplx> closed{bloch_band_energies(c, k).first, bloch_band_energies(c, k).second};
      EXPECT_LT(multiset_distance(ev, closed), 1e-12);
    }
  }
  EXPECT_THROW(build_bloch_hamiltonian(make(64, pi / 3, 0.5, Pattern::u1, Boundary::open), 0.0), std::invalid_argument);
}

TEST(Spectrum, BiorthogonalAndAccurate) {
  const SpectrumResult s = spectrum(make(64, pi / 3, 0.8, Pattern::u2, Boundary::open));
  EXPECT_LT(max_relative_residual(s), 1e-12);
  const MatrixXcd overlap = s.left_vectors * s.right_vectors;
  EXPECT_LT((overlap - MatrixXcd::Identity(64, 64)).cwiseAbs().maxCoeff(), 1e-9);
  for (int m = 0; m < s.size(); ++m) EXPECT_NEAR(s.right_vectors.col(m).norm(), 1.0, 1e-12);
  for (int m = 1; m < s.size(); ++m) EXPECT_FALSE(lex_less(s.eigenvalues(m), s.eigenvalues(m - 1)));
}

TEST(Spectrum, HermitianLimitIsReal) {
  const SpectrumResult s = spectrum(make(64, pi / 3, 0.0, Pattern::u2, Boundary::open));
  EXPECT_LT(s.eigenvalues.imag().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(classify_pt(s).unbroken);
}

TEST(Spectrum, EdgeModesAtPlusMinusIGamma) {
  for (double gamma : {0.25, 0.5, 1.0}) {
    const SpectrumResult s = spectrum(make(64, pi / 3, gamma, Pattern::u2, Boundary::open));
    std::vector<cplx> edge;
    for (int m = 0; m < s.size(); ++m)
      if (std::abs(s.eigenvalues(m).real()) < 1e-8) edge.push_back(s.eigenvalues(m));
    ASSERT_EQ(edge.size(), 2u) << "gamma = " << gamma;
    EXPECT_LT(multiset_distance(edge, {cplx(0, gamma), cplx(0, -gamma)}), 1e-8);
  }
}

TEST(Spectrum, TrivialChainHasNoEdgeModes) {
  const SpectrumResult s = spectrum(make(64, 2 * pi / 3, 0.5, Pattern::u2, Boundary::open));
  for (int m = 0; m < s.size(); ++m) EXPECT_GT(std::abs(s.eigenvalues(m).real()), 1e-3);
}

TEST(Spectrum, U1BifurcationNearThree) {
  // Trivial U1 chain: real for weak dissipation; past the PT transition four
  // boundary modes E = +-a +- ib move towards Re E = 0 and bifurcate near
  // gamma = 3 into purely imaginary pairs with distinct |Im E|.
  EXPECT_TRUE(classify_pt(spectrum(make(64, 2 * pi / 3, 0.4, Pattern::u1, Boundary::open))).unbroken);
  auto complex_modes = [](double gamma) {
    const SpectrumResult s = spectrum(make(64, 2 * pi / 3, gamma, Pattern::u1, Boundary::open));
    std::vector<cplx> out;
    for (int m = 0; m < s.size(); ++m)
      if (s.pt_class[m] != PtClass::real) out.push_back(s.eigenvalues(m));
    return out;
  };
  const auto before = complex_modes(2.8);
  ASSERT_EQ(before.size(), 4u);
  for (cplx e : before) EXPECT_GT(std::abs(e.real()), 0.1);
  const auto after = complex_modes(3.1);
  ASSERT_EQ(after.size(), 4u);
  std::vector<double> ims;
  for (cplx e : after) {
    EXPECT_LT(std::abs(e.real()), 1e-8);
    ims.push_back(std::abs(e.imag()));
  }
  std::sort(ims.begin(), ims.end());
  EXPECT_GT(ims[2] - ims[1], 0.5);
}

TEST(Spectrum, DefectiveFlag) {
  // A Jordan block has a single eigenvector: the biorthogonal pair is self-orthogonal.
  ComplexOperator jordan;
  jordan.dim = 2;
  jordan.entries = (MatrixXcd(2, 2) << 0.0, 1.0, 0.0, 0.0).finished();
  EXPECT_TRUE(complex_spectrum(jordan).any_defective());
  // Gain/loss dimer away from its exceptional point at gamma = t1.
  ModelConfig c = make(2, pi / 2, 0.5, Pattern::u2, Boundary::open);
  EXPECT_FALSE(spectrum(c).any_defective());
}

TEST(Lambda, OperatorAnticommutes) {
  for (Pattern p : {Pattern::u1, Pattern::u2}) {
    const SpectrumResult s = spectrum(make(20, 1.1, 0.7, p, Boundary::open));
    EXPECT_TRUE(check_lambda_symmetry(s, 1e-10));
  }
  const MatrixXd l = lambda_operator(8);
  EXPECT_TRUE((l * l.transpose()).isIdentity(1e-15));
  EXPECT_EQ(l(0, 7), -1.0);
  EXPECT_EQ(l(7, 0), 1.0);
}

TEST(Lambda, RandomPointsPairSpectrum) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(0.05, pi - 0.05), ga(0.0, 3.0);
  for (int trial = 0; trial < 5; ++trial)
    for (Pattern p : {Pattern::u1, Pattern::u2}) {
      const SpectrumResult s = spectrum(make(64, th(rng), ga(rng), p, Boundary::open));
      EXPECT_LT(lambda_pairing_error(s), 1e-10);
    }
}

TEST(Pt, ThresholdOfBlochBands) {
  const ModelConfig base = make(64, pi / 3, 0.0, Pattern::u2, Boundary::periodic);
  auto max_im = [&](double gamma) {
    ModelConfig c = base;
    c.gamma = gamma;
    double m = 0.0;
    for (int j = 0; j <= 400; ++j) {
      Eigen::ComplexEigenSolver<MatrixXcd> es(build_bloch_hamiltonian(c, 2 * pi * j / 400).entries, false);
      m = std::max(m, es.eigenvalues().imag().cwiseAbs().maxCoeff());
    }
    return m;
  };
  EXPECT_LT(max_im(0.99), 1e-10);
  EXPECT_GT(max_im(1.01), 0.01);
}

TEST(Mbs, SelectionRules) {
  SpectrumResult s;
  s.eigenvalues.resize(5);
  s.eigenvalues << cplx(-1, 0), cplx(1, 0), cplx(0.3, 0.5), cplx(0.3, -0.5), cplx(0, 0);
  const ModeSelection sel = construct_mbs(s);
  EXPECT_EQ(sel.occupied, (std::vector<int>{0, 2, 4}));
  EXPECT_EQ(sel.rationale[1], ModeRationale::unoccupied);
  EXPECT_EQ(sel.rationale[2], ModeRationale::gain_filled);
  EXPECT_EQ(sel.rationale[3], ModeRationale::loss_emptied);
  EXPECT_FALSE(sel.unique);
}

TEST(Mbs, HermitianFermiSeaIsFlat) {
  const SpectrumResult s = spectrum(make(64, 2 * pi / 3, 0.0, Pattern::none, Boundary::open));
  const OccupationProfile p = mbs_occupation(s, construct_mbs(s));
  for (double v : p.values) EXPECT_NEAR(v, 0.5, 1e-10);
}

TEST(Mbs, HalfFillingU2) {
  for (double theta : {pi / 3, 2 * pi / 3})
    for (double gamma : {0.5, 1.4, 2.5}) {
      const SpectrumResult s = spectrum(make(64, theta, gamma, Pattern::u2, Boundary::open));
      const ModeSelection sel = construct_mbs(s);
      EXPECT_EQ(sel.occupied.size(), 32u);
      const OccupationProfile p = mbs_occupation(s, sel);
      EXPECT_NEAR(p.total(), 32.0, 1e-8);
      EXPECT_FALSE(p.out_of_range);
    }
}

TEST(Mbs, StaggeringGrowsWithGamma) {
  // Bulk gain sites fill and loss sites empty as the dissipation grows.
  double prev = 0.0;
  for (double gamma : {1.4, 2.5, 5.0}) {
    const SpectrumResult s = spectrum(make(64, pi / 3, gamma, Pattern::u2, Boundary::open));
    const OccupationProfile p = mbs_occupation(s, construct_mbs(s));
    const double stagger = p.values[32] - p.values[33];
    EXPECT_GT(stagger, prev);
    prev = stagger;
  }
}

TEST(Mbs, TrivialU1WeakDissipation) {
  // PT-unbroken trivial U1 chain: the biorthogonal MBS is exactly half filled
  // on every site; unit-norm right vectors give a bulk within 1% of 1/2 with
  // small deviations at the dissipative ends.
  const SpectrumResult s = spectrum(make(64, 2 * pi / 3, 0.25, Pattern::u1, Boundary::open));
  ASSERT_TRUE(classify_pt(s).unbroken);
  const ModeSelection sel = construct_mbs(s);
  const OccupationProfile bio = mbs_occupation(s, sel, MbsWeighting::biorthogonal);
  for (double v : bio.values) EXPECT_NEAR(v, 0.5, 1e-10);
  const OccupationProfile right = mbs_occupation(s, sel);
  EXPECT_NEAR(right.total(), 32.0, 1e-10);
  for (int i = 4; i < 60; ++i) EXPECT_NEAR(right.values[i], 0.5, 0.01);
}

TEST(Sweeps, OverlapContinuationFollowsBranches) {
  ModelConfig c = make(16, pi / 3, 0.0, Pattern::u2, Boundary::open);
  SpectrumResult prev = spectrum(c);
  for (double gamma : {0.02, 0.04, 0.06}) {
    c.gamma = gamma;
    const SpectrumResult next = reorder(spectrum(c), continue_by_overlap(prev, spectrum(c)));
    for (int m = 0; m < next.size(); ++m) EXPECT_LT(std::abs(next.eigenvalues(m) - prev.eigenvalues(m)), 0.1);
    prev = next;
  }
}

TEST(Sweeps, DistanceContinuationIsPermutation) {
  const std::vector<cplx> a{{0, 1}, {1, 0}, {2, 2}}, b{{2.1, 2}, {0, 1.1}, {1.1, 0}};
  EXPECT_EQ(continue_by_distance(a, b), (std::vector<int>{1, 2, 0}));
  EXPECT_EQ(linspace(0, 1, 5).back(), 1.0);
  EXPECT_EQ(linspace(0.3, 1, 1), std::vector<double>{0.3});
  EXPECT_THROW(linspace(0, 1, 0), std::invalid_argument);
}

TEST(Sweeps, ExtremeDisorderPtTransition) {
  const ModelConfig c = make(64, pi / 3, 0.5, Pattern::u2, Boundary::periodic);
  const auto xi = extreme_disorder(c.cells());
  EXPECT_LT(max_abs_imag(disordered_spectrum(c, 0.24, xi, DisorderTarget::effective)), 1e-10);
  EXPECT_GT(max_abs_imag(disordered_spectrum(c, 0.26, xi, DisorderTarget::effective)), 1e-3);
}
