#pragma once

// Lattice definitions for the dissipative SSH chain: model configuration,
// hopping parameterization, dissipation patterns and symmetric hopping
// disorder. Everything downstream consumes the single-particle hopping matrix
// and the dissipation channel list built here.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace dssh {

inline constexpr double pi = std::numbers::pi;

enum class Boundary { open, periodic };
enum class Pattern { none, u1, u2 };

inline std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

inline std::string to_string(Pattern p) {
  switch (p) {
    case Pattern::none: return "none";
    case Pattern::u1: return "U1";
    case Pattern::u2: return "U2";
  }
  return "none";
}

inline Boundary parse_boundary(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic" || s == "ring") return Boundary::periodic;
  throw std::invalid_argument("unknown boundary '" + s + "' (expected open|periodic)");
}

inline Pattern parse_pattern(const std::string& s) {
  if (s == "none") return Pattern::none;
  if (s == "u1" || s == "U1") return Pattern::u1;
  if (s == "u2" || s == "U2") return Pattern::u2;
  throw std::invalid_argument("unknown pattern '" + s + "' (expected none|u1|u2)");
}

/// Parameters of one dissipative SSH chain.
///
/// Hoppings follow t1 = t(1 - delta cos theta), t2 = t(1 + delta cos theta);
/// theta < pi/2 is the nontrivial dimerization (t1 < t2).
struct ModelConfig {
  int n = 64;
  double t = 1.0;
  double delta = 1.0;
  double theta = pi / 3.0;
  double gamma = 0.0;
  Boundary boundary = Boundary::open;
  Pattern pattern = Pattern::none;

  int cells() const { return n / 2; }

  void validate() const {
    if (n < 2 || n % 2 != 0)
      throw std::invalid_argument("n must be an even integer >= 2, got " + std::to_string(n));
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
    if (!(theta >= 0.0 && theta <= pi + 1e-12))
      throw std::invalid_argument("theta must lie in [0, pi]");
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
    if (delta * std::abs(std::cos(theta)) > 1.0 + 1e-12)
      throw std::invalid_argument("delta*|cos(theta)| > 1 would make a hopping negative");
    if (pattern == Pattern::u1 && boundary != Boundary::open)
      throw std::invalid_argument("pattern U1 requires open boundary");
  }
};

inline void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"n", c.n},
                     {"t", c.t},
                     {"delta", c.delta},
                     {"theta", c.theta},
                     {"gamma", c.gamma},
                     {"boundary", to_string(c.boundary)},
                     {"pattern", to_string(c.pattern)}};
}

// Missing keys keep their current values so partial manifests work.
inline void from_json(const nlohmann::json& j, ModelConfig& c) {
  if (j.contains("n")) c.n = j.at("n").get<int>();
  if (j.contains("t")) c.t = j.at("t").get<double>();
  if (j.contains("delta")) c.delta = j.at("delta").get<double>();
  if (j.contains("theta")) c.theta = j.at("theta").get<double>();
  if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
  if (j.contains("boundary")) c.boundary = parse_boundary(j.at("boundary").get<std::string>());
  if (j.contains("pattern")) c.pattern = parse_pattern(j.at("pattern").get<std::string>());
}

struct Hoppings {
  double t1;
  double t2;
};

inline Hoppings hopping_amplitudes(const ModelConfig& c) {
  c.validate();
  const double shift = c.delta * std::cos(c.theta);
  return {c.t * (1.0 - shift), c.t * (1.0 + shift)};
}

/// Uniform (-1, 1) variables with xi[j] == xi[n_cells - 1 - j] (0-based).
///
/// Generator: std::mt19937_64 seeded with `seed`; each draw x maps to
/// u = ((x >> 11) + 0.5) * 2^-53 in (0, 1) and xi = 2u - 1. The first
/// ceil(n_cells / 2) entries are drawn in order and mirrored.
inline std::vector<double> sample_symmetric_disorder(int n_cells, std::uint64_t seed) {
  if (n_cells < 1) throw std::invalid_argument("n_cells must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> xi(static_cast<std::size_t>(n_cells));
  const int half = (n_cells + 1) / 2;
  for (int j = 0; j < half; ++j) {
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    xi[j] = 2.0 * u - 1.0;
    xi[n_cells - 1 - j] = xi[j];
  }
  return xi;
}

/// Splitmix64 finalizer over (seed, a, b): independent, reproducible seeds
/// for realization a at sweep point b.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t z = seed;
  for (std::uint64_t v : {a, b}) {
    z += 0x9e3779b97f4a7c15ULL + v;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
  }
  return z;
}

/// Per-cell hoppings after symmetric disorder of strength R.
struct DisorderRealization {
  double R = 0.0;
  std::vector<double> xi;
  std::vector<double> t1_tilde;
  std::vector<double> t2_tilde;
};

inline bool is_palindrome(std::span<const double> xi, double tol = 1e-12) {
  for (std::size_t j = 0; j < xi.size() / 2; ++j)
    if (std::abs(xi[j] - xi[xi.size() - 1 - j]) > tol) return false;
  return true;
}

inline DisorderRealization apply_disorder(const ModelConfig& c, double R, std::span<const double> xi) {
  const auto [t1, t2] = hopping_amplitudes(c);
  if (static_cast<int>(xi.size()) != c.cells())
    throw std::invalid_argument("disorder vector must have n/2 entries");
  if (!is_palindrome(xi))
    throw std::invalid_argument("disorder vector must satisfy xi_j = xi_{n/2+1-j}");
  if (!(R >= 0.0)) throw std::invalid_argument("disorder strength must be >= 0");
  DisorderRealization d;
  d.R = R;
  d.xi.assign(xi.begin(), xi.end());
  const double scale = std::abs(t1 - t2);
  for (double x : xi) {
    d.t1_tilde.push_back(t1 + R * x * scale);
    d.t2_tilde.push_back(t2 - R * x * scale);
  }
  return d;
}

/// Disorder strengths at which the extreme realization (all xi = 1) closes
/// the Hermitian gap (rc1) and breaks PT symmetry of the U2 chain (rc2).
struct CriticalStrengths {
  double rc1 = 0.5;
  std::optional<double> rc2;  // empty when the clean chain is already broken
};

inline CriticalStrengths critical_disorder_strengths(const ModelConfig& c) {
  const auto [t1, t2] = hopping_amplitudes(c);
  const double gap = std::abs(t1 - t2);
  CriticalStrengths out;
  if (gap > 0.0 && c.gamma < gap) out.rc2 = 0.5 * (1.0 - c.gamma / gap);
  return out;
}

/// Real symmetric matrix h with H = sum_ab h_ab c_a^dag c_b.
///
/// Cell j (0-based) owns sites 2j (A) and 2j+1 (B); the intra-cell bond uses
/// t1 of that cell and the bond to the next cell (or the wrap bond for the
/// last cell on a ring) uses its t2.
inline Eigen::MatrixXd hopping_matrix(const ModelConfig& c, const DisorderRealization* disorder = nullptr) {
  const auto [t1, t2] = hopping_amplitudes(c);
  const int n = c.n;
  const int cells = c.cells();
  if (disorder && (static_cast<int>(disorder->t1_tilde.size()) != cells ||
                   static_cast<int>(disorder->t2_tilde.size()) != cells))
    throw std::invalid_argument("disorder realization does not match the lattice size");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < cells; ++j) {
    const double intra = disorder ? disorder->t1_tilde[j] : t1;
    const double inter = disorder ? disorder->t2_tilde[j] : t2;
    const int a = 2 * j;
    const int b = 2 * j + 1;
    h(a, b) -= intra;
    h(b, a) -= intra;
    if (j + 1 < cells) {
      h(b, b + 1) -= inter;
      h(b + 1, b) -= inter;
    } else if (c.boundary == Boundary::periodic) {
      h(b, 0) -= inter;
      h(0, b) -= inter;
    }
  }
  return h;
}

/// One Lindblad channel: sqrt(rate) c_site (loss) or sqrt(rate) c_site^dag (gain).
struct Channel {
  int site;
  bool gain;
  double rate;
};

/// Channels in Lindblad index order mu = 1..n; sites without coupling are
/// omitted. U1: loss on the first site, gain on the last. U2: gain on even
/// 0-based sites (odd 1-based), loss on the others.
inline std::vector<Channel> dissipation_channels(const ModelConfig& c) {
  c.validate();
  std::vector<Channel> out;
  switch (c.pattern) {
    case Pattern::none:
      break;
    case Pattern::u1:
      out.push_back({0, false, c.gamma});
      out.push_back({c.n - 1, true, c.gamma});
      break;
    case Pattern::u2:
      for (int s = 0; s < c.n; ++s) out.push_back({s, s % 2 == 0, c.gamma});
      break;
  }
  return out;
}

/// Site-resolved occupations of a many-body state, one value per lattice site.
struct OccupationProfile {
  std::vector<double> values;
  bool out_of_range = false;   // some value outside [-tol, 1 + tol]
  bool imaginary_part = false; // source diagonal had a non-negligible imaginary part

  double total() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
};

}  // namespace dssh
