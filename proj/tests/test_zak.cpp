#include <gtest/gtest.h>

#include <random>

#include <dssh/zak.hpp>

using namespace dssh;

namespace {

ModelConfig ring(double theta, double gamma) {
  ModelConfig c;
  c.n = 64;
  c.theta = theta;
  c.gamma = gamma;
  c.pattern = Pattern::u2;
  c.boundary = Boundary::periodic;
  return c;
}

double angle_distance(double x, double target) {
  double r = std::fmod(x - target, 2 * pi);
  if (r < 0) r += 2 * pi;
  return std::min(r, 2 * pi - r);
}

// Independent route: with a(k) = -t1 - t2 e^{ik} the lower band of
// [[i g, a], [conj(a), -i g]] has E = -sqrt(|a|^2 - g^2), the periodic right
// vector phi = (a, E - i g) and left vector chi = (E + i g, a), chi phi = 2 a E.
// nu = int_0^{2 pi} i chi d_k phi / (chi phi) dk, integrated with the periodic
// trapezoid rule (spectrally accurate for this smooth integrand).
cplx analytic_zak_lower_band(const ModelConfig& c, int points = 4096) {
  const auto [t1, t2] = hopping_amplitudes(c);
  const double g = c.gamma;
  cplx sum = 0;
  for (int j = 0; j < points; ++j) {
    const double k = 2 * pi * j / points;
    const cplx a = -t1 - t2 * std::exp(I * k);
    const cplx da = -I * t2 * std::exp(I * k);
    const double a2 = std::norm(a);
    const cplx e = -std::sqrt(cplx(a2 - g * g, 0));
    // d|a|^2/dk = 2 Re(conj(a) a')
    const cplx de = -(std::conj(a) * da).real() / std::sqrt(cplx(a2 - g * g, 0));
    sum += I * ((e + I * g) * da + a * de) / (2.0 * a * e);
  }
  return sum * (2 * pi / points);
}

}  // namespace

TEST(Zak, HermitianSsh) {
  for (auto [theta, target] : {std::pair{pi / 3, pi}, std::pair{2 * pi / 3, 0.0}, std::pair{0.2, pi}}) {
    const ZakPhaseResult z = discrete_zak_phase(track_band(effective_builder(ring(theta, 0.0)), 0));
    EXPECT_LT(angle_distance(z.nu.real(), target), 1e-6);
    EXPECT_LT(std::abs(z.nu.imag()), 1e-10);
    EXPECT_EQ(z.N_k, default_nk);
  }
}

TEST(Zak, MatchesAnalyticConnectionIntegral) {
  for (double theta : {pi / 4, pi / 3, 2 * pi / 3})
    for (double gamma : {0.0, 0.3, 0.6}) {
      const ModelConfig c = ring(theta, gamma);
      const ZakPhaseResult z = discrete_zak_phase(track_band(effective_builder(c), 0));
      const cplx ref = analytic_zak_lower_band(c);
      EXPECT_LT(angle_distance(z.nu.real(), ref.real()), 1e-6) << theta << " " << gamma;
      // discrete loop carries an O(dk^2) error in the imaginary part
      EXPECT_NEAR(z.nu.imag(), ref.imag(), 1e-5) << theta << " " << gamma;
    }
  // and that error shrinks under refinement
  const ModelConfig c = ring(2 * pi / 3, 0.6);
  const cplx ref = analytic_zak_lower_band(c);
  const double coarse = std::abs(discrete_zak_phase(track_band(effective_builder(c), 0, 1000)).nu.imag() - ref.imag());
  const double fine = std::abs(discrete_zak_phase(track_band(effective_builder(c), 0, 4000)).nu.imag() - ref.imag());
  EXPECT_LT(fine, coarse / 8);
}

TEST(Zak, ImaginaryPartIsNotQuantized) {
  // the imaginary part varies with gamma while the real part stays pinned
  const cplx a = discrete_zak_phase(track_band(effective_builder(ring(pi / 3, 0.2)), 0)).nu;
  const cplx b = discrete_zak_phase(track_band(effective_builder(ring(pi / 3, 0.6)), 0)).nu;
  EXPECT_GT(std::abs(a.imag() - b.imag()), 1e-3);
  EXPECT_LT(angle_distance(a.real(), pi), 1e-6);
  EXPECT_LT(angle_distance(b.real(), pi), 1e-6);
}

TEST(Zak, QuantizationHelper) {
  EXPECT_EQ(quantize_real_part(cplx(pi + 1e-8, 3.0)), ZakClass::pi);
  EXPECT_EQ(quantize_real_part(cplx(-pi, 0.0)), ZakClass::pi);
  EXPECT_EQ(quantize_real_part(cplx(2 * pi - 1e-9, 0.0)), ZakClass::zero);
  EXPECT_EQ(quantize_real_part(cplx(1.0, 0.0)), ZakClass::unquantized);
  EXPECT_EQ(to_string(ZakClass::undefined_broken), "undefined_broken");
}

TEST(Zak, GaugeInvariance) {
  std::mt19937_64 rng(1);
  const BlochBand band = track_band(effective_builder(ring(pi / 3, 0.5)), 0);
  const cplx nu = discrete_zak_phase(band).nu;
  for (int trial = 0; trial < 100; ++trial)
    EXPECT_LT(std::abs(discrete_zak_phase(random_regauge(band, rng)).nu - nu), 1e-10);
}

TEST(Zak, GaugeInvarianceDegenerateBand) {
  std::mt19937_64 rng(2);
  const BlochBuilder b = liouvillean_builder(ring(2 * pi / 3, 1.0));
  const BlochBand band = track_band(b, select_nmm_band(b));
  EXPECT_EQ(band.degeneracy, 2);
  const cplx nu = discrete_zak_phase(band).nu;
  for (int trial = 0; trial < 20; ++trial)
    EXPECT_LT(std::abs(discrete_zak_phase(random_regauge(band, rng)).nu - nu), 1e-10);
}

TEST(Zak, ConvergesWithGridSize) {
  const BlochBuilder b = effective_builder(ring(pi / 3, 0.5));
  const ZakPhaseResult coarse = discrete_zak_phase(track_band(b, 0, 200));
  const ZakPhaseResult fine = discrete_zak_phase(track_band(b, 0, 2000));
  EXPECT_LT(std::abs(coarse.nu - fine.nu), 1e-3);
  EXPECT_LT(fine.richardson_estimate, 1e-4);
  EXPECT_LE(fine.richardson_estimate, coarse.richardson_estimate);
}

TEST(Zak, FiniteDifferenceConnectionAgrees) {
  const BlochBand band = track_band(effective_builder(ring(pi / 3, 0.4)), 0);
  for (int j : {0, 1, 500, 1000, 1999, 2000}) {
    const ConnectionCheck chk = finite_difference_connection_check(band, j);
    EXPECT_FALSE(chk.flagged) << "frame " << j << " residual " << chk.residual;
  }
}

TEST(Zak, BrokenAndGaplessCellsAreUndefined) {
  const ModelConfig tmpl = ring(pi / 3, 0.0);
  EXPECT_EQ(zak_cell(tmpl, pi / 3, 1.2, ZakSource::effective, 400).zak.real_class, ZakClass::undefined_broken);
  EXPECT_EQ(zak_cell(tmpl, pi / 2, 0.0, ZakSource::effective, 400).zak.real_class, ZakClass::undefined_gapless);
  const PhaseCell ok = zak_cell(tmpl, pi / 3, 0.5, ZakSource::effective, default_nk);
  EXPECT_EQ(ok.zak.real_class, ZakClass::pi);
  EXPECT_LT(angle_distance(ok.zak.nu.real(), pi), 1e-6);
}

TEST(Zak, GaplessBandThrowsWhenTrackedDirectly) {
  EXPECT_THROW(track_band(effective_builder(ring(pi / 2, 0.0)), 0, 400), GaplessError);
  EXPECT_THROW(track_band(effective_builder(ring(pi / 3, 0.5)), 5, 400), std::invalid_argument);
}

TEST(Zak, LiouvilleanBandsShareHermitianClass) {
  for (double theta : {pi / 3, 2 * pi / 3}) {
    const ZakClass want = theta < pi / 2 ? ZakClass::pi : ZakClass::zero;
    for (double gamma : {0.1, 1.0, 3.0}) {
      const BlochBuilder b = liouvillean_builder(ring(theta, gamma));
      const auto sizes = band_sizes(b);
      ASSERT_EQ(sizes.size(), 4u);
      for (std::size_t band = 0; band < sizes.size(); ++band) {
        EXPECT_EQ(sizes[band], 2);
        EXPECT_EQ(discrete_zak_phase(track_band(b, static_cast<int>(band))).real_class, want)
            << theta << " " << gamma << " band " << band;
      }
    }
  }
}

TEST(Zak, NmmBandSelection) {
  const BlochBuilder b = liouvillean_builder(ring(pi / 3, 1.0));
  const auto centers = band_centers(b);
  const int pick = select_nmm_band(b);
  for (cplx c : centers) EXPECT_LE(std::abs(c.imag()), std::abs(centers[pick].imag()) + 1e-9);
}

TEST(Zak, PhaseDiagramOrderAndLiouvilleanStripes) {
  const std::vector<double> thetas{pi / 4, 3 * pi / 4}, gammas{0.5, 2.0};
  const PhaseDiagram pd = phase_diagram(ring(pi / 3, 0.0), thetas, gammas, ZakSource::liouvillean, 800, 2);
  ASSERT_EQ(pd.cells.size(), 4u);
  EXPECT_DOUBLE_EQ(pd.cell(1, 0).theta, 3 * pi / 4);
  EXPECT_DOUBLE_EQ(pd.cell(1, 0).gamma, 0.5);
  for (std::size_t j = 0; j < gammas.size(); ++j) {
    EXPECT_EQ(pd.cell(0, j).zak.real_class, ZakClass::pi);
    EXPECT_EQ(pd.cell(1, j).zak.real_class, ZakClass::zero);
  }
}

TEST(Zak, EffectivePhaseDiagramRegions) {
  const std::vector<double> thetas{pi / 6, pi / 3, 2 * pi / 3}, gammas{0.3, 0.9, 1.5};
  const PhaseDiagram pd = phase_diagram(ring(pi / 3, 0.0), thetas, gammas, ZakSource::effective, 1000, 2);
  // |t1 - t2| = sqrt(3), 1, 1
  EXPECT_EQ(pd.cell(0, 2).zak.real_class, ZakClass::pi);
  EXPECT_EQ(pd.cell(1, 0).zak.real_class, ZakClass::pi);
  EXPECT_EQ(pd.cell(1, 2).zak.real_class, ZakClass::undefined_broken);
  EXPECT_EQ(pd.cell(2, 1).zak.real_class, ZakClass::zero);
  EXPECT_EQ(pd.cell(2, 2).zak.real_class, ZakClass::undefined_broken);
}

TEST(Zak, LiouvilleanNearGapClosingIsGapless) {
  // |t1 - t2| ~ 4e-5: the NMM bands nearly touch, which is a gap closing, not PT breaking
  const PhaseCell c = zak_cell(ring(pi / 3, 0.0), 1.5708, 0.5, ZakSource::liouvillean, default_nk);
  EXPECT_EQ(c.zak.real_class, ZakClass::undefined_gapless) << c.note;
}
