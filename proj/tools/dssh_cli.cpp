// dssh: data generator for the dissipative SSH chain.
//
//   dssh spectrum | rapidities | occupations | zak | disorder | validate | trajectory [flags]
//
// Exit codes: 0 success, 1 usage error, 2 computation failure, 3 validation failure.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <dssh/dssh.hpp>

namespace {

using namespace dssh;

constexpr int exit_usage = 1;
constexpr int exit_compute = 2;
constexpr int exit_validation = 3;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Common {
  int n = 64;
  double t = 1.0;
  double delta = 1.0;
  std::string theta = "pi/3";
  double gamma = 0.0;
  std::string pattern = "none";
  std::string boundary = "open";
  int nk = default_nk;
  std::uint64_t seed = 1;
  std::string output = "-";
  std::string format = "csv";
  std::string manifest;
  unsigned threads = 0;

  ModelConfig config() const {
    ModelConfig c;
    c.n = n;
    c.t = t;
    c.delta = delta;
    c.theta = parse_angle(theta);
    c.gamma = gamma;
    c.pattern = parse_pattern(pattern);
    c.boundary = parse_boundary(boundary);
    c.validate();
    return c;
  }
  Format fmt() const { return parse_format(format); }
  unsigned workers() const { return threads ? threads : default_workers(); }
};

struct GammaSweep {
  double min = 0.0;
  double max = 3.0;
  int steps = 0;  // 0: single point at --gamma

  bool active() const { return steps > 0; }
  std::vector<double> grid(double single) const {
    if (!active()) return {single};
    if (min < 0.0 || max < 0.0) throw UsageError("gamma sweep bounds must be >= 0");
    return linspace(min, max, steps);
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--n", c.n, "number of lattice sites (even)")->capture_default_str();
  app->add_option("--t", c.t, "hopping scale")->capture_default_str();
  app->add_option("--delta", c.delta, "dimerization amplitude")->capture_default_str();
  app->add_option("--theta", c.theta, "dimerization angle: radians or e.g. pi/3, 2pi/3")->capture_default_str();
  app->add_option("--gamma", c.gamma, "gain/loss rate")->capture_default_str();
  app->add_option("--pattern", c.pattern, "dissipation pattern none|u1|u2")->capture_default_str();
  app->add_option("--boundary", c.boundary, "open|periodic")->capture_default_str();
  app->add_option("--nk", c.nk, "Brillouin-zone points for Zak phases")->capture_default_str();
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--output,-o", c.output, "output file, '-' for stdout")->capture_default_str();
  app->add_option("--format", c.format, "csv|json")->capture_default_str();
  app->add_option("--manifest", c.manifest, "JSON run manifest; its values override flags");
  app->add_option("--threads", c.threads, "worker threads (0 = all cores)")->capture_default_str();
}

void add_gamma_sweep(CLI::App* app, GammaSweep& g) {
  app->add_option("--gamma-min", g.min, "first gamma of a sweep")->capture_default_str();
  app->add_option("--gamma-max", g.max, "last gamma of a sweep")->capture_default_str();
  app->add_option("--gamma-steps", g.steps, "number of gamma points (0 = just --gamma)")->capture_default_str();
}

std::vector<std::string> header(const std::string& command, const ModelConfig& c) {
  nlohmann::json j = c;
  return {"dssh " + command, "config " + j.dump()};
}

void emit(OutputSet& out, const Common& common, const Table& table) {
  out.add(common.output, render(table, common.fmt()));
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  GammaSweep sweep;
  std::string vectors;
};

void cmd_spectrum(const Common& common, const SpectrumArgs& a) {
  ModelConfig c = common.config();
  const auto gammas = a.sweep.grid(c.gamma);
  if (!a.vectors.empty() && gammas.size() != 1) throw UsageError("--vectors needs a single gamma");
  std::vector<SpectrumResult> spectra(gammas.size());
  parallel_for(
      gammas.size(),
      [&](std::size_t i) {
        ModelConfig ci = c;
        ci.gamma = gammas[i];
        spectra[i] = complex_spectrum(build_real_space_hamiltonian(ci));
      },
      common.workers());
  for (std::size_t i = 1; i < spectra.size(); ++i)
    spectra[i] = reorder(spectra[i], continue_by_overlap(spectra[i - 1], spectra[i]));

  Table t;
  t.comments = header("spectrum", c);
  t.comments.push_back(a.sweep.active() ? "ordering: (Re, Im) at the first gamma, then biorthogonal-overlap continuation"
                                        : "ordering: (Re, Im)");
  if (a.sweep.active()) t.columns.push_back("gamma");
  for (const char* col : {"index", "re_E", "im_E", "pt_class"}) t.columns.push_back(col);
  int defective = 0;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const SpectrumResult& s = spectra[i];
    for (int m = 0; m < s.size(); ++m) {
      std::vector<Cell> row;
      if (a.sweep.active()) row.push_back(gammas[i]);
      row.push_back(std::int64_t{m});
      row.push_back(s.eigenvalues(m).real());
      row.push_back(s.eigenvalues(m).imag());
      row.push_back(to_string(s.pt_class[m]));
      t.add_row(std::move(row));
      defective += s.defective[m] ? 1 : 0;
    }
  }
  t.comments.push_back("near-exceptional modes: " + std::to_string(defective));

  OutputSet out;
  emit(out, common, t);
  if (!a.vectors.empty()) {
    const SpectrumResult& s = spectra.front();
    nlohmann::json j;
    nlohmann::json ev = nlohmann::json::array();
    for (int m = 0; m < s.size(); ++m) ev.push_back({s.eigenvalues(m).real(), s.eigenvalues(m).imag()});
    j["eigenvalues"] = ev;
    j["right_columns"] = complex_matrix_json(s.right_vectors);
    j["left_rows"] = complex_matrix_json(s.left_vectors);
    out.add(a.vectors, j.dump() + "\n");
  }
  out.commit();
}

// -------------------------------------------------------------- rapidities

struct RapidityArgs {
  GammaSweep sweep;
  bool oracle = false;
};

void cmd_rapidities(const Common& common, const RapidityArgs& a) {
  ModelConfig c = common.config();
  if (c.pattern == Pattern::none) throw UsageError("rapidities need a dissipation pattern (u1|u2)");
  if (a.oracle) {
    if (c.pattern != Pattern::u2 || c.boundary != Boundary::periodic)
      throw UsageError("--oracle requires --pattern u2 --boundary periodic");
    if (common.output == "-") throw UsageError("--oracle needs --output FILE (the closed form goes to a sibling file)");
  }
  const auto gammas = a.sweep.grid(c.gamma);
  std::vector<RapiditySpectrum> spectra(gammas.size());
  parallel_for(
      gammas.size(),
      [&](std::size_t i) {
        ModelConfig ci = c;
        ci.gamma = gammas[i];
        spectra[i] = rapidities(build_shape_matrix(ci));
      },
      common.workers());
  for (std::size_t i = 1; i < spectra.size(); ++i) {
    const auto perm = continue_by_distance(spectra[i - 1].betas, spectra[i].betas);
    RapiditySpectrum r = spectra[i];
    for (std::size_t m = 0; m < perm.size(); ++m) {
      r.betas[m] = spectra[i].betas[perm[m]];
      r.degeneracy_id[m] = spectra[i].degeneracy_id[perm[m]];
    }
    spectra[i] = std::move(r);
  }

  auto table = [&](const std::string& title) {
    Table t;
    t.comments = header(title, c);
    if (a.sweep.active()) t.columns.push_back("gamma");
    return t;
  };
  Table t = table("rapidities");
  t.comments.push_back(a.sweep.active() ? "ordering: (Re, Im) at the first gamma, then nearest-value continuation"
                                        : "ordering: (Re, Im)");
  for (const char* col : {"index", "re_beta", "im_beta", "degeneracy_id"}) t.columns.push_back(col);
  double worst_pairing = 0.0;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const auto& r = spectra[i];
    worst_pairing = std::max(worst_pairing, r.pairing_error);
    for (std::size_t m = 0; m < r.betas.size(); ++m) {
      std::vector<Cell> row;
      if (a.sweep.active()) row.push_back(gammas[i]);
      row.push_back(static_cast<std::int64_t>(m));
      row.push_back(r.betas[m].real());
      row.push_back(r.betas[m].imag());
      row.push_back(static_cast<std::int64_t>(r.degeneracy_id[m]));
      t.add_row(std::move(row));
    }
  }
  t.comments.push_back("max pairing error: " + format_double(worst_pairing));

  OutputSet out;
  emit(out, common, t);
  if (a.oracle) {
    Table o = table("rapidities closed form (gamma +- i E(k)) / 2");
    for (const char* col : {"index", "re_beta", "im_beta"}) o.columns.push_back(col);
    for (double g : gammas) {
      ModelConfig ci = c;
      ci.gamma = g;
      const auto betas = analytic_rapidities_u2_ring(ci);
      for (std::size_t m = 0; m < betas.size(); ++m) {
        std::vector<Cell> row;
        if (a.sweep.active()) row.push_back(g);
        row.push_back(static_cast<std::int64_t>(m));
        row.push_back(betas[m].real());
        row.push_back(betas[m].imag());
        o.add_row(std::move(row));
      }
    }
    out.add(sibling_path(common.output, "analytic"), render(o, common.fmt()));
  }
  out.commit();
}

// ------------------------------------------------------------- occupations

struct OccupationArgs {
  std::string weighting = "right";
  std::string covariance;
};

void cmd_occupations(const Common& common, const OccupationArgs& a) {
  const ModelConfig c = common.config();
  MbsWeighting w;
  if (a.weighting == "right")
    w = MbsWeighting::right_norm;
  else if (a.weighting == "biorthogonal")
    w = MbsWeighting::biorthogonal;
  else
    throw UsageError("--mbs-weighting must be right|biorthogonal");
  if (c.pattern == Pattern::none || !(c.gamma > 0.0))
    throw UsageError("occupations need gamma > 0 and a dissipation pattern: the steady state is otherwise not unique");

  const CovarianceMatrix cov = ness_covariance(c);
  const OccupationProfile ness = ness_occupation(cov);
  const SpectrumResult s = complex_spectrum(build_real_space_hamiltonian(c));
  const ModeSelection sel = construct_mbs(s);
  const OccupationProfile mbs = mbs_occupation(s, sel, w);

  Table t;
  t.comments = header("occupations", c);
  t.comments.push_back("mbs weighting: " + a.weighting);
  t.comments.push_back("ness total: " + format_double(ness.total()));
  t.comments.push_back("mbs total: " + format_double(mbs.total()) + " (" + std::to_string(sel.occupied.size()) +
                       " occupied modes)");
  if (!sel.unique) t.comments.push_back("warning: zero-energy mode makes the MBS filling ambiguous");
  if (ness.out_of_range || mbs.out_of_range) t.comments.push_back("warning: occupation outside [0, 1]");
  if (ness.imaginary_part) t.comments.push_back("warning: covariance diagonal has an imaginary part");
  t.columns = {"site", "ness_occ", "mbs_occ"};
  for (int i = 0; i < c.n; ++i) t.add_row({std::int64_t{i + 1}, ness.values[i], mbs.values[i]});

  OutputSet out;
  emit(out, common, t);
  if (!a.covariance.empty()) out.add(a.covariance, complex_matrix_json(cov.entries).dump() + "\n");
  out.commit();
}

// --------------------------------------------------------------------- zak

struct ZakArgs {
  std::string which = "effective";
  std::string theta_min = "0";
  std::string theta_max = "pi";
  int theta_steps = 0;  // 0: single theta from --theta
  GammaSweep sweep;
};

void cmd_zak(const Common& common, const ZakArgs& a) {
  ModelConfig c = common.config();
  const ZakSource which = parse_zak_source(a.which);
  if (common.nk < 2) throw UsageError("--nk must be >= 2");
  std::vector<double> thetas{c.theta};
  if (a.theta_steps > 0) thetas = linspace(parse_angle(a.theta_min), parse_angle(a.theta_max), a.theta_steps);
  const auto gammas = a.sweep.grid(c.gamma);
  const PhaseDiagram pd = phase_diagram(c, thetas, gammas, which, common.nk, common.workers());

  Table t;
  t.comments = header("zak", c);
  t.comments.push_back("source: " + a.which + (which == ZakSource::liouvillean ? " (NMM band of the Bloch Liouvillean)" : " (lower band)"));
  t.comments.push_back("N_k: " + std::to_string(common.nk));
  t.comments.push_back("grid: " + std::to_string(thetas.size()) + " theta x " + std::to_string(gammas.size()) +
                       " gamma, theta-major order");
  t.columns = {"theta", "gamma", "re_nu", "im_nu", "class"};
  for (const PhaseCell& cell : pd.cells) {
    const bool defined =
        cell.zak.real_class != ZakClass::undefined_broken && cell.zak.real_class != ZakClass::undefined_gapless;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (defined)
      t.add_row({cell.theta, cell.gamma, cell.zak.nu.real(), cell.zak.nu.imag(), to_string(cell.zak.real_class)});
    else
      t.add_row({cell.theta, cell.gamma, nan, nan, to_string(cell.zak.real_class)});
  }
  OutputSet out;
  emit(out, common, t);
  out.commit();
}

// ---------------------------------------------------------------- disorder

struct DisorderArgs {
  std::string which = "effective";
  int realizations = 100;
  bool extreme = false;
  double r_min = 0.0;
  double r_max = 0.7;
  int r_steps = 71;
  std::string mode = "reuse";
};

void cmd_disorder(const Common& common, const DisorderArgs& a) {
  const ModelConfig c = common.config();
  DisorderTarget target;
  if (a.which == "effective")
    target = DisorderTarget::effective;
  else if (a.which == "liouvillean")
    target = DisorderTarget::liouvillean;
  else
    throw UsageError("--which must be effective|liouvillean");
  if (target == DisorderTarget::liouvillean && c.pattern == Pattern::none)
    throw UsageError("liouvillean disorder spectra need a dissipation pattern");
  if (a.mode != "reuse" && a.mode != "resample") throw UsageError("--mode must be reuse|resample");
  if (a.realizations < 0) throw UsageError("--realizations must be >= 0");
  if (a.realizations == 0 && !a.extreme) throw UsageError("nothing to do: --realizations 0 without --extreme");
  const auto Rs = linspace(a.r_min, a.r_max, a.r_steps);
  for (double R : Rs)
    if (R < 0.0) throw UsageError("disorder strengths must be >= 0");

  // Realization -1 is the extreme case xi_j = 1.
  std::vector<int> labels;
  if (a.extreme) labels.push_back(-1);
  for (int r = 0; r < a.realizations; ++r) labels.push_back(r);
  const int cells = c.cells();
  std::vector<std::vector<cplx>> spectra(labels.size() * Rs.size());
  parallel_for(
      spectra.size(),
      [&](std::size_t idx) {
        const int label = labels[idx / Rs.size()];
        const std::size_t iR = idx % Rs.size();
        std::vector<double> xi;
        if (label < 0)
          xi = extreme_disorder(cells);
        else
          xi = sample_symmetric_disorder(
              cells, derive_seed(common.seed, static_cast<std::uint64_t>(label), a.mode == "reuse" ? 0 : iR + 1));
        spectra[idx] = disordered_spectrum(c, Rs[iR], xi, target);
      },
      common.workers());

  Table t;
  t.comments = header("disorder", c);
  const CriticalStrengths crit = critical_disorder_strengths(c);
  t.comments.push_back("source: " + a.which + "; mode: " + a.mode + "; realization -1 = extreme (all xi = 1)");
  t.comments.push_back("seed: " + std::to_string(common.seed) +
                       "; per-realization seed = splitmix64(seed, realization, reuse ? 0 : R index + 1)");
  t.comments.push_back("Rc1 = " + format_double(crit.rc1) +
                       (crit.rc2 ? "; Rc2 = " + format_double(*crit.rc2) : std::string("; Rc2 undefined")));
  const bool eff = target == DisorderTarget::effective;
  t.columns = {"realization", "R", "index", eff ? "re_E" : "re_beta", eff ? "im_E" : "im_beta"};
  for (std::size_t idx = 0; idx < spectra.size(); ++idx) {
    const std::int64_t label = labels[idx / Rs.size()];
    const double R = Rs[idx % Rs.size()];
    for (std::size_t m = 0; m < spectra[idx].size(); ++m)
      t.add_row({label, R, static_cast<std::int64_t>(m), spectra[idx][m].real(), spectra[idx][m].imag()});
  }
  OutputSet out;
  emit(out, common, t);
  out.commit();
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  std::string fault;
};

int cmd_validate(const Common& common, const ValidateArgs& a) {
  ValidationOptions opt;
  if (a.fault == "covariance-sign")
    opt.flip_covariance_sign = true;
  else if (!a.fault.empty())
    throw UsageError("--inject-fault accepts only covariance-sign");
  opt.nk = common.nk;
  const auto results = run_validation(opt);
  Table t;
  t.comments = {"dssh validate"};
  if (opt.flip_covariance_sign) t.comments.push_back("fault injected: covariance damping sign flipped");
  t.columns = {"check", "status", "max_residual", "tolerance", "detail"};
  bool all = true;
  for (const CheckResult& r : results) {
    t.add_row({r.name, std::string(r.passed ? "PASS" : "FAIL"), r.max_residual, r.tolerance, r.detail});
    all = all && r.passed;
  }
  t.comments.push_back(all ? "result: all checks passed" : "result: FAILED");
  OutputSet out;
  emit(out, common, t);
  out.commit();
  if (common.output != "-")
    for (const CheckResult& r : results)
      std::cerr << (r.passed ? "PASS " : "FAIL ") << r.name << " " << format_double(r.max_residual) << "\n";
  return all ? 0 : exit_validation;
}

// -------------------------------------------------------------- trajectory

struct TrajectoryArgs {
  double t_max = 10.0;
  int steps = 200;
  std::uint64_t initial = 0;
};

void cmd_trajectory(const Common& common, const TrajectoryArgs& a) {
  const ModelConfig c = common.config();
  if (c.n > 6) throw UsageError("trajectory: the exact master-equation oracle supports n <= 6");
  if (a.initial >= (std::uint64_t{1} << c.n)) throw UsageError("--initial is not a Fock state of this chain");
  if (!(a.t_max > 0.0) || a.steps < 1) throw UsageError("need --t-max > 0 and --steps >= 1");
  const Superoperator s = dense_liouvillean(c);
  const Trajectory traj = oracle_time_evolution(s, basis_state(c.n, a.initial), a.t_max, a.steps);

  Table t;
  t.comments = header("trajectory", c);
  t.comments.push_back("initial Fock state (bit m = site m + 1 occupied): " + std::to_string(a.initial));
  t.comments.push_back("fitted asymptotic rate: " + format_double(traj.fitted_rate));
  t.columns.push_back("t");
  for (int i = 1; i <= c.n; ++i) t.columns.push_back("n_" + std::to_string(i));
  t.columns.push_back("trace_distance");
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    std::vector<Cell> row{traj.t[k]};
    for (double v : traj.occupations[k]) row.push_back(v);
    row.push_back(traj.distance[k]);
    t.add_row(std::move(row));
  }
  OutputSet out;
  emit(out, common, t);
  out.commit();
}

// -------------------------------------------------------------------- main

const std::vector<std::string> subcommands{"spectrum", "rapidities", "occupations", "zak",
                                           "disorder", "validate",   "trajectory"};

// Finds --manifest PATH (or --manifest=PATH) among the raw arguments.
std::string find_manifest(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--manifest") {
      if (i + 1 >= args.size()) throw UsageError("--manifest needs a path");
      path = args[i + 1];
    } else if (args[i].rfind("--manifest=", 0) == 0) {
      path = args[i].substr(11);
    }
  }
  return path;
}

// Appends manifest values after the explicit flags so that they take precedence.
std::vector<std::string> expand_manifest(std::vector<std::string> args) {
  const std::string path = find_manifest(args);
  if (path.empty()) return args;
  const ManifestArgs m = load_manifest(path);
  std::string cmd;
  for (const auto& a : args)
    if (std::find(subcommands.begin(), subcommands.end(), a) != subcommands.end()) {
      cmd = a;
      break;
    }
  if (cmd.empty()) {
    if (m.command.empty()) throw UsageError("manifest names no command and none was given");
    args.insert(args.begin(), m.command);
  } else if (!m.command.empty() && m.command != cmd) {
    throw UsageError("manifest is for '" + m.command + "' but the command is '" + cmd + "'");
  }
  args.insert(args.end(), m.tokens.begin(), m.tokens.end());
  return args;
}

int run(std::vector<std::string> args) {
  CLI::App app{"Spectra, steady states and Zak phases of the dissipative SSH chain"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  Common common;
  SpectrumArgs spec;
  RapidityArgs rap;
  OccupationArgs occ;
  ZakArgs zak;
  DisorderArgs dis;
  ValidateArgs val;
  TrajectoryArgs traj;

  auto* s_spec = app.add_subcommand("spectrum", "effective-Hamiltonian eigenvalues (optionally over a gamma sweep)");
  add_common(s_spec, common);
  add_gamma_sweep(s_spec, spec.sweep);
  s_spec->add_option("--vectors", spec.vectors, "also write eigenvectors as JSON to this file");

  auto* s_rap = app.add_subcommand("rapidities", "shape-matrix rapidities (optionally over a gamma sweep)");
  add_common(s_rap, common);
  add_gamma_sweep(s_rap, rap.sweep);
  s_rap->add_flag("--oracle", rap.oracle, "co-emit the closed form for the U2 ring to NAME.analytic.EXT");

  auto* s_occ = app.add_subcommand("occupations", "steady-state and MBS site occupations");
  add_common(s_occ, common);
  s_occ->add_option("--mbs-weighting", occ.weighting, "right|biorthogonal")->capture_default_str();
  s_occ->add_option("--covariance", occ.covariance, "also write the steady-state covariance as JSON");

  auto* s_zak = app.add_subcommand("zak", "complex Zak phase over a (theta, gamma) grid");
  add_common(s_zak, common);
  add_gamma_sweep(s_zak, zak.sweep);
  s_zak->add_option("--which", zak.which, "effective|liouvillean")->capture_default_str();
  s_zak->add_option("--theta-min", zak.theta_min, "first theta of a sweep")->capture_default_str();
  s_zak->add_option("--theta-max", zak.theta_max, "last theta of a sweep")->capture_default_str();
  s_zak->add_option("--theta-steps", zak.theta_steps, "number of theta points (0 = just --theta)")
      ->capture_default_str();

  auto* s_dis = app.add_subcommand("disorder", "spectra of symmetrically disordered chains versus R");
  add_common(s_dis, common);
  s_dis->add_option("--which", dis.which, "effective|liouvillean")->capture_default_str();
  s_dis->add_option("--realizations", dis.realizations, "random realizations")->capture_default_str();
  s_dis->add_flag("--extreme", dis.extreme, "include the extreme realization xi_j = 1 (labelled -1)");
  s_dis->add_option("--r-min", dis.r_min, "smallest disorder strength")->capture_default_str();
  s_dis->add_option("--r-max", dis.r_max, "largest disorder strength")->capture_default_str();
  s_dis->add_option("--r-steps", dis.r_steps, "number of strengths")->capture_default_str();
  s_dis->add_option("--mode", dis.mode, "reuse: one draw per realization; resample: fresh draw per R")
      ->capture_default_str();

  auto* s_val = app.add_subcommand("validate", "cross-check every route against independent oracles");
  add_common(s_val, common);
  s_val->add_option("--inject-fault", val.fault, "deliberately break a route (covariance-sign)");

  auto* s_traj = app.add_subcommand("trajectory", "exact master-equation relaxation of a small chain (n <= 6)");
  add_common(s_traj, common);
  s_traj->add_option("--t-max", traj.t_max, "final time")->capture_default_str();
  s_traj->add_option("--steps", traj.steps, "time steps")->capture_default_str();
  s_traj->add_option("--initial", traj.initial, "initial Fock state as a bit mask")->capture_default_str();

  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  if (s_spec->parsed()) cmd_spectrum(common, spec);
  if (s_rap->parsed()) cmd_rapidities(common, rap);
  if (s_occ->parsed()) cmd_occupations(common, occ);
  if (s_zak->parsed()) cmd_zak(common, zak);
  if (s_dis->parsed()) cmd_disorder(common, dis);
  if (s_traj->parsed()) cmd_trajectory(common, traj);
  if (s_val->parsed()) return cmd_validate(common, val);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(expand_manifest(std::vector<std::string>(argv + 1, argv + argc)));
  } catch (const NonUniqueError& e) {
    std::cerr << "dssh: " << e.what() << "\n";
    return exit_compute;
  } catch (const std::invalid_argument& e) {
    std::cerr << "dssh: " << e.what() << "\n";
    return exit_usage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "dssh: manifest: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "dssh: computation failed: " << e.what() << "\n";
    return exit_compute;
  }
}
