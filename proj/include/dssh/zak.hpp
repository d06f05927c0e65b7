#pragma once

// Complex Zak phases of Bloch bands via biorthogonal discrete Wilson loops.
//
// A band (or a d-fold degenerate band subspace) is tracked around the
// Brillouin zone as a sequence of frames (R_j, L_j) with L_j R_j = 1_d. Each
// link uses the symmetrized biorthogonal overlap
//     S_j = M_j (N_j M_j)^{-1/2},  M_j = L_j R_{j+1},  N_j = L_{j+1} R_j,
// which is the unitary polar factor of the overlap for Hermitian bands. The
// holonomy W = S_0 S_1 ... S_{N-1} (the k = 2 pi frame is the k = 0 frame)
// transforms as G_0^{-1} W G_0 under any frame rescaling, so its eigenvalues
// are exactly gauge invariant. nu = mean over eigenvalues lambda of W of
// i Log(lambda), the real part taken in (-pi/2, 3pi/2].

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "effective.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "third_quant.hpp"

namespace dssh {

using BlochBuilder = std::function<MatrixXcd(double)>;

inline constexpr int default_nk = 2000;
inline constexpr double default_quantization_tol = 1e-6;

struct BlochBand {
  std::vector<double> k_grid;            // N_k + 1 points, k_grid[N_k] = 2 pi
  std::vector<MatrixXcd> right_vectors;  // per k: dim x d
  std::vector<MatrixXcd> left_vectors;   // per k: d x dim, left * right = 1_d
  std::vector<VectorXcd> eigenvalues;    // per k: d values
  std::vector<double> continuity;        // per link: |det(N_j M_j)^{1/d} - 1|
  int band_index = 0;
  int degeneracy = 1;
  double max_condition = 1.0;            // largest spectral-projector norm along the loop

  int nk() const { return static_cast<int>(k_grid.size()) - 1; }
};

struct TrackOptions {
  int degeneracy = 0;             // expected subspace dimension; 0 = take it from k = 0
  bool strict = true;             // throw on continuity loss / defective frames
  double cluster_tol = 1e-9;      // relative: eigenvalues closer than this form one subspace
  double gap_tol = 1e-8;          // relative: other eigenvalues closer than this = gapless
  double continuity_tol = 0.25;   // max |det(N M)^{1/d} - 1| per link
  double defective_tol = defective_threshold;
};

namespace detail {

struct Cluster {
  std::vector<Eigen::Index> members;
  cplx center;
};

struct Frames {
  Eigensystem es;
  std::vector<Cluster> clusters;  // (Re, Im) order of centers
  double scale = 1.0;
};

inline Frames frames_at(const BlochBuilder& builder, double k, double cluster_tol) {
  Frames f;
  f.es = eig(builder(k));
  const auto n = f.es.values.size();
  f.scale = std::max(1.0, f.es.values.cwiseAbs().maxCoeff());
  const double tol = cluster_tol * f.scale;
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    std::vector<Eigen::Index> stack{i};
    label[i] = next;
    Cluster c;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      c.members.push_back(u);
      for (Eigen::Index v = 0; v < n; ++v)
        if (label[v] < 0 && std::abs(f.es.values(u) - f.es.values(v)) <= tol) {
          label[v] = next;
          stack.push_back(v);
        }
    }
    std::sort(c.members.begin(), c.members.end());
    c.center = 0.0;
    for (auto m : c.members) c.center += f.es.values(m);
    c.center /= static_cast<double>(c.members.size());
    f.clusters.push_back(std::move(c));
    ++next;
  }
  std::stable_sort(f.clusters.begin(), f.clusters.end(),
                   [](const Cluster& a, const Cluster& b) { return lex_less(a.center, b.center); });
  return f;
}

inline MatrixXcd right_of(const Frames& f, const Cluster& c) {
  MatrixXcd r(f.es.right.rows(), static_cast<Eigen::Index>(c.members.size()));
  for (std::size_t a = 0; a < c.members.size(); ++a) r.col(a) = f.es.right.col(c.members[a]);
  return r;
}

inline MatrixXcd left_of(const Frames& f, const Cluster& c) {
  MatrixXcd l(static_cast<Eigen::Index>(c.members.size()), f.es.left.cols());
  for (std::size_t a = 0; a < c.members.size(); ++a) l.row(a) = f.es.left.row(c.members[a]);
  return l;
}

inline VectorXcd values_of(const Frames& f, const Cluster& c) {
  VectorXcd v(static_cast<Eigen::Index>(c.members.size()));
  for (std::size_t a = 0; a < c.members.size(); ++a) v(a) = f.es.values(c.members[a]);
  return v;
}

/// Distance from the cluster's eigenvalues to the nearest eigenvalue outside it.
inline double gap_of(const Frames& f, const Cluster& c) {
  double g = std::numeric_limits<double>::infinity();
  for (Eigen::Index v = 0; v < f.es.values.size(); ++v) {
    if (std::find(c.members.begin(), c.members.end(), v) != c.members.end()) continue;
    for (auto m : c.members) g = std::min(g, std::abs(f.es.values(m) - f.es.values(v)));
  }
  return g;
}

/// Operator 2-norm of the spectral projector R L (1 for orthogonal projectors).
inline double projector_norm(const MatrixXcd& r, const MatrixXcd& l) {
  Eigen::JacobiSVD<MatrixXcd> svd(r * l);
  return svd.singularValues()(0);
}

/// det(N M)^{1/d}, the gauge-invariant overlap of two neighbouring frames.
inline cplx link_overlap(const MatrixXcd& ra, const MatrixXcd& la, const MatrixXcd& rb, const MatrixXcd& lb) {
  const MatrixXcd m = la * rb;
  const MatrixXcd nn = lb * ra;
  const cplx det = (nn * m).determinant();
  return std::pow(det, 1.0 / static_cast<double>(m.rows()));
}

}  // namespace detail

/// Bands at k = 0 in (Re, Im) order of their (cluster-mean) eigenvalues.
inline std::vector<cplx> band_centers(const BlochBuilder& builder, double cluster_tol = 1e-9) {
  std::vector<cplx> out;
  for (const auto& c : detail::frames_at(builder, 0.0, cluster_tol).clusters) out.push_back(c.center);
  return out;
}

inline std::vector<int> band_sizes(const BlochBuilder& builder, double cluster_tol = 1e-9) {
  std::vector<int> out;
  for (const auto& c : detail::frames_at(builder, 0.0, cluster_tol).clusters)
    out.push_back(static_cast<int>(c.members.size()));
  return out;
}

/// Follows band `band_index` (k = 0 clusters in (Re, Im) order) around the
/// Brillouin zone on N_k + 1 points, choosing at every step the subspace with
/// the largest gauge-invariant overlap. Throws GaplessError when the tracked
/// subspace touches another eigenvalue or changes dimension, ContinuityError
/// when neighbouring frames stop overlapping (exceptional points inside the
/// loop, or a grid that is too coarse) and DefectiveError for self-orthogonal
/// frames; the last two only in strict mode.
inline BlochBand track_band(const BlochBuilder& builder, int band_index, int nk = default_nk,
                            const TrackOptions& opt = {}) {
  if (nk < 2) throw std::invalid_argument("track_band: N_k must be >= 2");
  const detail::Frames f0 = detail::frames_at(builder, 0.0, opt.cluster_tol);
  if (band_index < 0 || band_index >= static_cast<int>(f0.clusters.size()))
    throw std::invalid_argument("track_band: band index out of range");
  const detail::Cluster& c0 = f0.clusters[band_index];
  const int d = opt.degeneracy > 0 ? opt.degeneracy : static_cast<int>(c0.members.size());

  BlochBand band;
  band.band_index = band_index;
  band.degeneracy = d;

  auto accept = [&](const detail::Frames& f, const detail::Cluster& c, double k) {
    if (static_cast<int>(c.members.size()) != d || detail::gap_of(f, c) < opt.gap_tol * f.scale)
      throw GaplessError("band touches another band near k = " + std::to_string(k));
    MatrixXcd r = detail::right_of(f, c), l = detail::left_of(f, c);
    const double cond = detail::projector_norm(r, l);
    band.max_condition = std::max(band.max_condition, cond);
    if (opt.strict && !(cond < opt.defective_tol))
      throw DefectiveError("self-orthogonal eigenvectors (exceptional point) near k = " + std::to_string(k));
    band.k_grid.push_back(k);
    band.right_vectors.push_back(std::move(r));
    band.left_vectors.push_back(std::move(l));
    band.eigenvalues.push_back(detail::values_of(f, c));
  };
  auto check_link = [&](double k) {
    const std::size_t j = band.right_vectors.size() - 2;
    const cplx p = detail::link_overlap(band.right_vectors[j], band.left_vectors[j], band.right_vectors[j + 1],
                                        band.left_vectors[j + 1]);
    const double dev = std::abs(p - 1.0);
    band.continuity.push_back(dev);
    if (opt.strict && !(dev <= opt.continuity_tol))
      throw ContinuityError("band continuity lost near k = " + std::to_string(k) +
                            " (exceptional point inside the loop or N_k too small)");
  };
  auto best_cluster = [&](const detail::Frames& f) -> std::size_t {
    const MatrixXcd& r = band.right_vectors.back();
    const MatrixXcd& l = band.left_vectors.back();
    std::size_t best = 0;
    double score = -1.0;
    for (std::size_t c = 0; c < f.clusters.size(); ++c) {
      const MatrixXcd rc = detail::right_of(f, f.clusters[c]), lc = detail::left_of(f, f.clusters[c]);
      double s;
      if (rc.cols() == r.cols())
        s = std::abs((lc * r * l * rc).determinant());
      else
        s = (l * rc).norm() * (lc * r).norm() / static_cast<double>(std::max(rc.cols(), r.cols()));
      if (s > score) {
        score = s;
        best = c;
      }
    }
    return best;
  };

  accept(f0, c0, 0.0);
  for (int j = 1; j < nk; ++j) {
    const double k = 2.0 * pi * j / nk;
    const detail::Frames f = detail::frames_at(builder, k, opt.cluster_tol);
    accept(f, f.clusters[best_cluster(f)], k);
    check_link(k);
  }
  // Closure: the k = 2 pi frame is the k = 0 frame itself.
  if (best_cluster(f0) != static_cast<std::size_t>(band_index)) {
    if (opt.strict) throw ContinuityError("tracked band does not return to itself around the Brillouin zone");
  }
  band.k_grid.push_back(2.0 * pi);
  band.right_vectors.push_back(band.right_vectors.front());
  band.left_vectors.push_back(band.left_vectors.front());
  band.eigenvalues.push_back(band.eigenvalues.front());
  check_link(2.0 * pi);
  return band;
}

enum class ZakClass { zero, pi, unquantized, undefined_broken, undefined_gapless };

inline std::string to_string(ZakClass z) {
  switch (z) {
    case ZakClass::zero: return "zero";
    case ZakClass::pi: return "pi";
    case ZakClass::unquantized: return "unquantized";
    case ZakClass::undefined_broken: return "undefined_broken";
    case ZakClass::undefined_gapless: return "undefined_gapless";
  }
  return "unquantized";
}

struct ZakPhaseResult {
  cplx nu{0.0, 0.0};
  ZakClass real_class = ZakClass::unquantized;
  int N_k = 0;
  double richardson_estimate = 0.0;  // |nu(N_k) - nu(N_k / 2)|, bounds the change under doubling
  int degeneracy = 1;
  std::vector<cplx> holonomy_eigenvalues;
};

/// Real part mod 2 pi compared against 0 and pi.
inline ZakClass quantize_real_part(cplx nu, double tol = default_quantization_tol) {
  const double two_pi = 2.0 * pi;
  double r = std::fmod(nu.real(), two_pi);
  if (r < 0.0) r += two_pi;
  if (std::min(r, two_pi - r) <= tol) return ZakClass::zero;
  if (std::abs(r - pi) <= tol) return ZakClass::pi;
  return ZakClass::unquantized;
}

inline ZakClass quantize_real_part(const ZakPhaseResult& z, double tol = default_quantization_tol) {
  if (z.real_class == ZakClass::undefined_broken || z.real_class == ZakClass::undefined_gapless) return z.real_class;
  return quantize_real_part(z.nu, tol);
}

namespace detail {

/// Wilson-loop holonomy over frames 0, stride, 2 stride, ..., N_k.
inline MatrixXcd holonomy(const BlochBand& band, int stride) {
  const int nk = band.nk();
  const int d = band.degeneracy;
  MatrixXcd w = MatrixXcd::Identity(d, d);
  for (int j = 0; j < nk; j += stride) {
    const int b = j + stride;
    const MatrixXcd m = band.left_vectors[j] * band.right_vectors[b];
    const MatrixXcd nn = band.left_vectors[b] * band.right_vectors[j];
    MatrixXcd s;
    if (d == 1) {
      s = m / std::sqrt((nn * m)(0, 0));
    } else {
      const MatrixXcd g = nn * m;
      s = m * MatrixXcd(g.sqrt()).inverse();
    }
    w = w * s;
  }
  return w;
}

inline cplx phase_from_holonomy(const MatrixXcd& w, std::vector<cplx>* eigs = nullptr) {
  Eigen::ComplexEigenSolver<MatrixXcd> es(w, false);
  cplx sum = 0.0;
  for (Eigen::Index a = 0; a < es.eigenvalues().size(); ++a) {
    const cplx lam = es.eigenvalues()(a);
    if (eigs) eigs->push_back(lam);
    double re = -std::arg(lam);  // in [-pi, pi]
    if (re <= -0.5 * pi) re += 2.0 * pi;
    sum += cplx(re, std::log(std::abs(lam)));
  }
  return sum / static_cast<double>(es.eigenvalues().size());
}

}  // namespace detail

/// Complex Zak phase of a tracked band (subspace mean for degenerate bands).
inline ZakPhaseResult discrete_zak_phase(const BlochBand& band, double quant_tol = default_quantization_tol) {
  const int nk = band.nk();
  if (nk < 2 || band.right_vectors.size() != static_cast<std::size_t>(nk + 1))
    throw std::invalid_argument("discrete_zak_phase: malformed band");
  ZakPhaseResult z;
  z.N_k = nk;
  z.degeneracy = band.degeneracy;
  z.nu = detail::phase_from_holonomy(detail::holonomy(band, 1), &z.holonomy_eigenvalues);
  const double floor = 1e-12;
  if (nk % 2 == 0 && nk >= 4) {
    const cplx coarse = detail::phase_from_holonomy(detail::holonomy(band, 2));
    z.richardson_estimate = std::abs(z.nu - coarse) + floor;
  } else {
    z.richardson_estimate = std::numeric_limits<double>::infinity();
  }
  z.real_class = quantize_real_part(z.nu, quant_tol);
  return z;
}

/// Copy of the band with every frame rescaled R_j -> R_j G_j, L_j -> G_j^{-1} L_j
/// by random invertible G_j (the closing frame reuses G_0).
inline BlochBand random_regauge(const BlochBand& band, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.3, 3.0), ph(-pi, pi), mix(-0.3, 0.3);
  BlochBand out = band;
  const int d = band.degeneracy;
  std::vector<MatrixXcd> gs;
  for (int j = 0; j < band.nk(); ++j) {
    MatrixXcd g(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        g(a, b) = a == b ? std::polar(mag(rng), ph(rng)) : cplx(mix(rng), mix(rng));
    gs.push_back(g);
  }
  gs.push_back(gs.front());
  for (int j = 0; j <= band.nk(); ++j) {
    out.right_vectors[j] = band.right_vectors[j] * gs[j];
    out.left_vectors[j] = gs[j].inverse() * band.left_vectors[j];
  }
  return out;
}

/// Builders for the two Bloch matrices of the alternating gain/loss ring.
inline BlochBuilder effective_builder(ModelConfig c) {
  return [c](double k) { return build_bloch_hamiltonian(c, k).entries; };
}

inline BlochBuilder liouvillean_builder(ModelConfig c) {
  c.pattern = Pattern::u2;
  c.boundary = Boundary::periodic;
  return [c](double k) { return build_bloch_liouvillean(c, k); };
}

/// The NMM band reported in phase diagrams: largest |Im beta| at k = 0, ties
/// resolved towards the largest (Re, Im).
inline int select_nmm_band(const BlochBuilder& builder, double tie_tol = 1e-9) {
  const auto centers = band_centers(builder);
  double best_im = 0.0;
  for (cplx c : centers) best_im = std::max(best_im, std::abs(c.imag()));
  int pick = -1;
  for (int i = 0; i < static_cast<int>(centers.size()); ++i)
    if (std::abs(centers[i].imag()) >= best_im - tie_tol * std::max(1.0, best_im)) pick = i;
  return pick;
}

enum class ZakSource { effective, liouvillean };

inline ZakSource parse_zak_source(const std::string& s) {
  if (s == "effective") return ZakSource::effective;
  if (s == "liouvillean") return ZakSource::liouvillean;
  throw std::invalid_argument("unknown Zak source '" + s + "' (expected effective|liouvillean)");
}

struct PhaseCell {
  double theta = 0.0;
  double gamma = 0.0;
  ZakPhaseResult zak;
  std::string note;  // reason for undefined classes
};

/// Cells in theta-major order: cell(i, j) = cells[i * gamma_grid.size() + j].
struct PhaseDiagram {
  std::vector<double> theta_grid;
  std::vector<double> gamma_grid;
  std::vector<PhaseCell> cells;

  const PhaseCell& cell(std::size_t i, std::size_t j) const { return cells[i * gamma_grid.size() + j]; }
};

/// Zak phase of one (theta, gamma) point of the alternating gain/loss ring.
/// Failures are reported through the class, never thrown.
inline PhaseCell zak_cell(const ModelConfig& tmpl, double theta, double gamma, ZakSource which, int nk) {
  PhaseCell cell;
  cell.theta = theta;
  cell.gamma = gamma;
  cell.zak.N_k = nk;
  ModelConfig c = tmpl;
  c.theta = theta;
  c.gamma = gamma;
  c.pattern = Pattern::u2;
  c.boundary = Boundary::periodic;
  try {
    c.validate();
    const auto [t1, t2] = hopping_amplitudes(c);
    const double gap = std::abs(t1 - t2);
    BlochBuilder builder;
    int band = 0;
    if (which == ZakSource::effective) {
      if (gamma >= gap && gap > 1e-12) {
        cell.zak.real_class = ZakClass::undefined_broken;
        cell.note = "PT broken: gamma >= |t1 - t2|";
        return cell;
      }
      builder = effective_builder(c);
    } else {
      builder = liouvillean_builder(c);
      band = select_nmm_band(builder);
    }
    TrackOptions opt;
    if (which == ZakSource::liouvillean) opt.degeneracy = 2;
    cell.zak = discrete_zak_phase(track_band(builder, band, nk, opt));
  } catch (const GaplessError& e) {
    cell.zak.real_class = ZakClass::undefined_gapless;
    cell.note = e.what();
  } catch (const DefectiveError& e) {
    // the Liouvillean has no PT-broken phase: its bands only fail where the gap closes
    cell.zak.real_class = which == ZakSource::effective ? ZakClass::undefined_broken : ZakClass::undefined_gapless;
    cell.note = e.what();
  } catch (const ContinuityError& e) {
    cell.zak.real_class = which == ZakSource::effective && gamma > 0.0 ? ZakClass::undefined_broken
                                                                       : ZakClass::undefined_gapless;
    cell.note = e.what();
  } catch (const std::exception& e) {
    cell.zak.real_class = ZakClass::unquantized;
    cell.note = std::string("error: ") + e.what();
  }
  return cell;
}

inline PhaseDiagram phase_diagram(const ModelConfig& tmpl, const std::vector<double>& thetas,
                                  const std::vector<double>& gammas, ZakSource which, int nk = default_nk,
                                  unsigned workers = default_workers()) {
  PhaseDiagram pd;
  pd.theta_grid = thetas;
  pd.gamma_grid = gammas;
  pd.cells.resize(thetas.size() * gammas.size());
  parallel_for(
      pd.cells.size(),
      [&](std::size_t idx) {
        pd.cells[idx] = zak_cell(tmpl, thetas[idx / gammas.size()], gammas[idx % gammas.size()], which, nk);
      },
      workers);
  return pd;
}

struct ConnectionCheck {
  cplx finite_difference;  // i <chi_j| (phi_{j+1} - phi_{j-1}) / (2 dk)
  cplx link_derivative;    // i (Log<chi_j|phi_{j+1}> - Log<chi_j|phi_{j-1}>) / (2 dk)
  double residual = 0.0;
  bool flagged = false;
};

/// Compares the finite-difference Berry connection at frame j with the
/// derivative of the link logarithms in a locally smooth gauge (largest
/// component of phi_j made real and positive on all three frames). The
/// residual is O(dk^2) for smooth bands; it is flagged when it is not small
/// or when the neighbouring links have lost continuity.
inline ConnectionCheck finite_difference_connection_check(const BlochBand& band, int j, double flag_tol = 1e-3) {
  if (band.degeneracy != 1) throw std::invalid_argument("connection check needs a non-degenerate band");
  const int nk = band.nk();
  if (j < 0 || j > nk) throw std::invalid_argument("connection check: frame index out of range");
  const int jm = j == 0 ? nk - 1 : j - 1;
  const int jp = j == nk ? 1 : j + 1;
  const double dk = 2.0 * pi / nk;

  Eigen::Index p;
  band.right_vectors[j].col(0).cwiseAbs().maxCoeff(&p);
  auto fixed = [&](int f) {
    const cplx ref = band.right_vectors[f](p, 0);
    const cplx ph = ref / std::abs(ref);
    return std::pair<VectorXcd, Eigen::RowVectorXcd>{band.right_vectors[f].col(0) / ph,
                                                      band.left_vectors[f].row(0) * ph};
  };
  const auto [phi_m, chi_m] = fixed(jm);
  const auto [phi_0, chi_0] = fixed(j);
  const auto [phi_p, chi_p] = fixed(jp);
  (void)chi_m;
  (void)chi_p;
  (void)phi_0;

  ConnectionCheck out;
  out.finite_difference = I * (chi_0 * (phi_p - phi_m))(0, 0) / (2.0 * dk);
  const cplx lp = (chi_0 * phi_p)(0, 0), lm = (chi_0 * phi_m)(0, 0);
  out.link_derivative = I * (std::log(lp) - std::log(lm)) / (2.0 * dk);
  out.residual = std::abs(out.finite_difference - out.link_derivative);
  const int link_before = j == 0 ? nk - 1 : j - 1;
  const int link_after = j == nk ? 0 : j;
  const double link_dev = std::max(band.continuity[link_before], band.continuity[link_after]);
  out.flagged = !(out.residual <= flag_tol * std::max(1.0, std::abs(out.link_derivative))) || link_dev > 0.25;
  return out;
}

}  // namespace dssh
