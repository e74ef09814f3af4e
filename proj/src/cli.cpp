#include "channelstab/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "channelstab/config.hpp"
#include "channelstab/io.hpp"
#include "channelstab/parallel.hpp"
#include "channelstab/verify.hpp"

namespace cstab {

namespace fs = std::filesystem;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::Config:
      return kExitConfig;
    case ErrorKind::LemmaViolation:
    case ErrorKind::Invertibility:
    case ErrorKind::GammaSelection:
    case ErrorKind::WellPosedness:
    case ErrorKind::ScanExhausted:
      return kExitCriterion;
    case ErrorKind::Convergence:
    case ErrorKind::UnsupportedMode:
    case ErrorKind::Numeric:
    case ErrorKind::Defective:
      return kExitNumeric;
  }
  return kExitNumeric;
}

namespace {

struct Flags {
  std::string config, out, from;
  std::optional<int> threads, n, scan_limit, K_max, record_every, startup_steps;
  std::optional<double> nu, kappa, eps, alpha, rho0, C_U, eta, T, dt, gamma_base, amplitude;
  std::optional<std::string> phi_tg, a, b, ic, ic_mode, scheme;
  std::optional<std::uint64_t> seed;
  bool no_feedback = false;
  bool emit_states = false;
  bool refine = false;
  std::vector<int> criteria;
};

std::string mode_name(ModeIndex m) { return "(" + std::to_string(m.k) + "," + std::to_string(m.l) + ")"; }
std::string mode_file(ModeIndex m) { return std::to_string(m.k) + "_" + std::to_string(m.l); }

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string num(cd z) { return "(" + num(z.real()) + ", " + num(z.imag()) + ")"; }

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

RunConfig build_config(const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) c = load_config(f.config);
  auto set = [](auto& dst, const auto& src) {
    if (src) dst = *src;
  };
  set(c.threads, f.threads);
  set(c.n, f.n);
  set(c.params.nu, f.nu);
  set(c.params.kappa, f.kappa);
  set(c.params.eps, f.eps);
  set(c.params.alpha, f.alpha);
  set(c.params.rho0, f.rho0);
  set(c.params.C_U, f.C_U);
  set(c.phi_tg, f.phi_tg);
  set(c.scan_limit, f.scan_limit);
  set(c.eta_target, f.eta);
  set(c.gamma_base, f.gamma_base);
  set(c.T, f.T);
  set(c.dt, f.dt);
  set(c.K_max, f.K_max);
  set(c.record_every, f.record_every);
  set(c.startup_steps, f.startup_steps);
  set(c.scheme, f.scheme);
  set(c.ic.recipe, f.ic);
  set(c.ic.seed, f.seed);
  set(c.ic.amplitude, f.amplitude);
  if (f.ic_mode) c.ic.mode = parse_mode(*f.ic_mode);
  if (f.a) c.actuator_a = parse_complex(*f.a);
  if (f.b) c.actuator_b = parse_complex(*f.b);
  if (f.no_feedback) c.feedback = false;
  if (f.emit_states) c.emit.states = true;
  c.validate();
  return c;
}

nlohmann::json optional_complex(const std::optional<cd>& z) {
  return z ? complex_json(*z) : nlohmann::json(nullptr);
}

void write_complex_rows(const fs::path& path, const std::vector<CVec>& rows) {
  std::ofstream bin(path, std::ios::binary);
  for (const auto& r : rows)
    for (int i = 0; i < r.size(); ++i) {
      const double re = r(i).real(), im = r(i).imag();
      bin.write(reinterpret_cast<const char*>(&re), sizeof re);
      bin.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  if (!bin) throw Error(ErrorKind::Config, "cannot write " + path.string());
}

// Upstream stages with on-disk caching. Every stage writes its artifact into
// the output directory whether it was computed or loaded.
class Session {
 public:
  Session(RunConfig cfg, fs::path out, fs::path from, std::ostream& os)
      : cfg_(std::move(cfg)), out_(std::move(out)), from_(std::move(from)), os_(os) {
    threads_ = resolve_threads(cfg_.threads);
    ensure_dir(out_);
    write_json(out_ / "run_config.json", to_json(cfg_));
  }

  const RunConfig& cfg() const { return cfg_; }
  const fs::path& out() const { return out_; }
  int threads() const { return threads_; }
  std::ostream& os() { return os_; }

  const Grid& grid() {
    if (!grid_) grid_ = build_grid(cfg_.n);
    return *grid_;
  }

  nlohmann::json stamp() const {
    return {{"n", cfg_.n}, {"params", to_json(cfg_.params)}, {"guess", cfg_.phi_tg}};
  }

  const SteadyState& steady() {
    if (steady_) return *steady_;
    const Grid& g = grid();
    auto c = cached("steady.json");
    if (c && matches(*c, stamp())) {
      steady_ = steady_from_json(*c, g);
      os_ << "using cached steady state from " << from_.string() << "\n";
    } else {
      if (c) os_ << "cached steady state does not match the configuration, recomputing\n";
      steady_ = build_steady(cfg_.params, g, parse_target_guess(cfg_.phi_tg));
    }
    nlohmann::json j = to_json(*steady_, g);
    j["guess"] = cfg_.phi_tg;
    write_json(out_ / "steady.json", j);
    std::ostringstream csv;
    csv << "y,U,phi_tg,phi_inf\n";
    for (int i = 0; i < g.n; ++i)
      csv << fmt(g.nodes(i)) << ',' << fmt(steady_->U(i)) << ',' << fmt(steady_->phi_tg(i)) << ','
          << fmt(steady_->phi_inf(i)) << '\n';
    write_text(out_ / "profile.csv", csv.str());
    return *steady_;
  }

  nlohmann::json cutoff_stamp() const {
    nlohmann::json s = stamp();
    s["eta_target"] = cfg_.eta_target;
    s["scan_limit"] = cfg_.scan_limit;
    return s;
  }

  // Full spectra of every scanned mode; sets the cutoff as a side effect.
  void full_scan() {
    const Grid& g = grid();
    const SteadyState& st = steady();
    const auto modes = scan_modes(cfg_.scan_limit);
    const int count = int(modes.size());
    std::vector<CVec> lambdas(count);
    std::vector<std::vector<std::pair<cd, cd>>> traces(count);
    std::vector<ModeScan> scan(count);
    parallel_for(count, threads_, [&](int i) {
      const ModePencil p = mode_pencil(modes[i], g, st);
      lambdas[i] = pencil_eigenvalues(p);
      scan[i].mode = modes[i];
      scan[i].abscissa = spectral_abscissa(lambdas[i]);
      for (int j = 0; j < lambdas[i].size(); ++j)
        if (lambdas[i](j).real() >= -1e-8) ++scan[i].N_unstable;
      if (modes[i].k != 0 && scan[i].N_unstable > 0) traces[i] = solve_pencil_eigen(p, g).traces;
    });
    if (cfg_.emit.spectra) {
      std::ostringstream csv;
      write_spectrum_csv_header(csv);
      for (int i = 0; i < count; ++i) write_spectrum_csv(csv, modes[i], lambdas[i], scan[i].N_unstable, traces[i]);
      write_text(out_ / "spectrum.csv", csv.str());
    }
    CutoffResult c;
    c.scan = scan;
    c.M = cutoff_from_scan(c.scan, cfg_.eta_target, cfg_.scan_limit, &c.worst_beyond);
    set_cutoff(std::move(c));
  }

  const CutoffResult& cutoff() {
    if (cutoff_) return *cutoff_;
    auto c = cached("cutoff.json");
    if (c && matches(*c, cutoff_stamp())) {
      CutoffResult r;
      try {
        r.M = c->at("M").get<int>();
        r.worst_beyond = c->at("worst_beyond").is_null() ? -std::numeric_limits<double>::infinity()
                                                          : c->at("worst_beyond").get<double>();
        for (const auto& s : c->at("scan"))
          r.scan.push_back({{s.at("mode")[0].get<int>(), s.at("mode")[1].get<int>()},
                            s.at("abscissa").get<double>(),
                            s.at("N_unstable").get<int>()});
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("malformed cutoff file: ") + e.what());
      }
      os_ << "using cached cutoff from " << from_.string() << "\n";
      set_cutoff(std::move(r));
    } else {
      if (c) os_ << "cached cutoff does not match the configuration, recomputing\n";
      set_cutoff(determine_cutoff(steady(), grid(), cfg_.eta_target, cfg_.scan_limit, threads_));
    }
    return *cutoff_;
  }

  nlohmann::json gains_stamp() {
    nlohmann::json s = cutoff_stamp();
    s["M"] = cutoff().M;
    s["gamma_base"] = cfg_.gamma_base;
    s["forced_a"] = optional_complex(cfg_.actuator_a);
    s["forced_b"] = optional_complex(cfg_.actuator_b);
    return s;
  }

  ControlSet& controls() {
    if (controls_) return *controls_;
    const nlohmann::json stamp = gains_stamp();
    auto c = cached("gains.json");
    if (c && matches(*c, stamp)) {
      ControlSet cs;
      try {
        cs.M = c->at("M").get<int>();
        const auto& a = c->at("actuator");
        cs.actuator = {complex_from_json(a.at("a")), complex_from_json(a.at("b")), a.at("margin_a").get<double>(),
                       a.at("margin_b").get<double>()};
        for (const auto& g : c->at("modes")) cs.gains.push_back(gains_from_json(g));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("malformed gains file: ") + e.what());
      }
      os_ << "using cached gains from " << from_.string() << "\n";
      controls_ = std::move(cs);
    } else {
      if (c) os_ << "cached gains do not match the configuration, recomputing\n";
      ControlOptions o;
      o.threads = threads_;
      o.a = cfg_.actuator_a;
      o.b = cfg_.actuator_b;
      o.gamma_base = cfg_.gamma_base;
      controls_ = build_controls(steady(), grid(), cutoff().M, o);
    }
    nlohmann::json j = stamp;
    j["schema"] = "channelstab.gains_summary/1";
    j["actuator"] = {{"a", complex_json(controls_->actuator.a)},
                     {"b", complex_json(controls_->actuator.b)},
                     {"margin_a", controls_->actuator.margin_a},
                     {"margin_b", controls_->actuator.margin_b}};
    j["modes"] = nlohmann::json::array();
    for (const auto& g : controls_->gains) j["modes"].push_back(to_json(g));
    write_json(out_ / "gains.json", j);
    if (cfg_.emit.gains) {
      ensure_dir(out_ / "gains");
      for (const auto& g : controls_->gains)
        if (!g.empty()) write_json(out_ / "gains" / ("gains_" + mode_file(g.mode) + ".json"), to_json(g));
    }
    return *controls_;
  }

  // Eigensets are not cached on disk; recomputed when an initial condition needs them.
  void ensure_eigs() {
    ControlSet& cs = controls();
    if (!cs.eigs.empty()) return;
    const auto modes = actuated_modes(cs.M);
    cs.pencils.resize(modes.size());
    cs.eigs.resize(modes.size());
    parallel_for(int(modes.size()), threads_, [&](int i) {
      cs.pencils[i] = assemble_pencil(modes[i], grid(), steady());
      cs.eigs[i] = solve_pencil_eigen(cs.pencils[i], grid());
    });
  }

 private:
  std::optional<nlohmann::json> cached(const std::string& name) const {
    if (from_.empty()) return std::nullopt;
    const fs::path p = from_ / name;
    if (!fs::exists(p)) return std::nullopt;
    return read_json(p);
  }

  static bool matches(const nlohmann::json& j, const nlohmann::json& stamp) {
    for (auto it = stamp.begin(); it != stamp.end(); ++it)
      if (!j.contains(it.key()) || j.at(it.key()) != *it) return false;
    return true;
  }

  void set_cutoff(CutoffResult c) {
    cutoff_ = std::move(c);
    nlohmann::json j = cutoff_stamp();
    j["schema"] = "channelstab.cutoff/1";
    j["M"] = cutoff_->M;
    j["worst_beyond"] = finite_or_null(cutoff_->worst_beyond);
    j["scan"] = nlohmann::json::array();
    for (const auto& s : cutoff_->scan)
      j["scan"].push_back({{"mode", {s.mode.k, s.mode.l}}, {"abscissa", s.abscissa}, {"N_unstable", s.N_unstable}});
    write_json(out_ / "cutoff.json", j);
  }

  RunConfig cfg_;
  fs::path out_;
  fs::path from_;
  std::ostream& os_;
  int threads_ = 1;
  std::optional<Grid> grid_;
  std::optional<SteadyState> steady_;
  std::optional<CutoffResult> cutoff_;
  std::optional<ControlSet> controls_;
};

int cmd_steady(Session& s) {
  const SteadyState& st = s.steady();
  s.os() << "gamma = " << num(st.gamma) << "\n"
         << "H0 = " << (st.h0 ? "true" : "false") << "\n"
         << "residual = " << num(st.residual) << "\n";
  return kExitPass;
}

void print_inventory(Session& s, const CutoffResult& c) {
  bool any = false;
  for (const auto& m : c.scan)
    if (m.N_unstable > 0) {
      if (!any) s.os() << "mode      N   worst Re lambda\n";
      any = true;
      s.os() << std::left << std::setw(10) << mode_name(m.mode) << std::setw(4) << m.N_unstable << num(m.abscissa)
             << "\n";
    }
  if (!any) s.os() << "no unstable modes, M=" << c.M << "\n";
  else s.os() << "M = " << c.M << "\n";
  s.os() << "worst abscissa beyond M = " << num(c.worst_beyond) << "\n";
}

int cmd_spectrum(Session& s, bool refine) {
  s.full_scan();
  const CutoffResult& c = s.cutoff();
  print_inventory(s, c);
  if (!refine) return kExitPass;
  const int n2 = (3 * s.cfg().n / 2 + 1) / 2 * 2;
  const Grid g2 = build_grid(n2);
  const SteadyState st2 = build_steady(s.cfg().params, g2, parse_target_guess(s.cfg().phi_tg));
  const auto scan2 = scan_spectra(st2, g2, s.cfg().scan_limit, s.threads());
  nlohmann::json diffs = nlohmann::json::array();
  for (std::size_t i = 0; i < scan2.size(); ++i)
    if (scan2[i].N_unstable != c.scan[i].N_unstable)
      diffs.push_back({{"mode", {scan2[i].mode.k, scan2[i].mode.l}},
                       {"N_unstable", c.scan[i].N_unstable},
                       {"N_unstable_refined", scan2[i].N_unstable}});
  write_json(s.out() / "refine.json",
             {{"schema", "channelstab.refine/1"}, {"n", s.cfg().n}, {"n_refined", n2}, {"differences", diffs}});
  if (diffs.empty()) {
    s.os() << "refinement n=" << n2 << ": unstable counts agree on " << scan2.size() << " modes\n";
    return kExitPass;
  }
  for (const auto& d : diffs)
    s.os() << "refinement n=" << n2 << ": mode (" << d["mode"][0] << "," << d["mode"][1] << ") N "
           << d["N_unstable"] << " -> " << d["N_unstable_refined"] << "\n";
  return kExitCriterion;
}

int cmd_gains(Session& s) {
  const ControlSet& cs = s.controls();
  s.os() << "M = " << cs.M << "\n"
         << "a = " << num(cs.actuator.a) << "  margin " << num(cs.actuator.margin_a) << "\n"
         << "b = " << num(cs.actuator.b) << "  margin " << num(cs.actuator.margin_b) << "\n";
  double worst_cond = 0.0, worst_lifting = 0.0;
  bool any = false;
  for (const auto& g : cs.gains) {
    if (g.empty()) continue;
    any = true;
    worst_cond = std::max(worst_cond, g.cond_R);
    worst_lifting = std::max(worst_lifting, g.lifting_residual);
    s.os() << "mode " << std::left << std::setw(8) << mode_name(g.mode) << " N=" << g.gammas.size()
           << "  cond_R=" << num(g.cond_R) << "  lifting residual=" << num(g.lifting_residual)
           << "  reduced abscissa=" << num(g.reduced_abscissa) << "\n";
  }
  if (!any) {
    s.os() << "no gains needed\n";
    return kExitPass;
  }
  s.os() << "worst cond_R = " << num(worst_cond) << "\n";
  if (!(worst_lifting <= 1e-6)) {
    s.os() << "lifting identity residual " << num(worst_lifting) << " exceeds 1e-6\n";
    return kExitCriterion;
  }
  return kExitPass;
}

void write_states(Session& s, const DecayReport& rep) {
  const fs::path dir = s.out() / "states";
  ensure_dir(dir);
  for (const auto& ms : rep.modes) {
    const std::string stem = "state_" + mode_file(ms.mode);
    const bool zero = ms.mode.k == 0 && ms.mode.l == 0;
    const int dim = ms.states.empty() ? 0 : int(ms.states.front().size());
    nlohmann::json h = {{"schema", "channelstab.states/1"},
                        {"mode", {ms.mode.k, ms.mode.l}},
                        {"n", s.cfg().n},
                        {"dim", dim},
                        {"blocks", zero ? nlohmann::json{"u", "w", "phi"} : nlohmann::json{"v", "phi", "eta"}},
                        {"records", ms.states.size()},
                        {"times", std::vector<double>(rep.times.begin(), rep.times.begin() + ms.states.size())},
                        {"layout", "row-major"},
                        {"dtype", "complex128-le"},
                        {"data_file", stem + ".bin"}};
    write_json(dir / (stem + ".json"), h);
    write_complex_rows(dir / (stem + ".bin"), ms.states);
  }
}

int cmd_simulate(Session& s) {
  const RunConfig& c = s.cfg();
  ControlSet& cs = s.controls();
  if (c.ic.recipe == "unstable-eigenvector") s.ensure_eigs();
  SimOptions o;
  o.K_max = c.K_max > 0 ? c.K_max : cs.M + 2;
  o.T = c.T;
  o.dt = c.dt;
  o.record_every = c.record_every;
  o.ic = c.ic;
  o.feedback = c.feedback;
  o.threads = s.threads();
  o.scheme = parse_scheme(c.scheme);
  o.startup_steps = c.startup_steps;
  o.keep_states = c.emit.states;
  const DecayReport rep = run_simulation(o, s.grid(), s.steady(), cs);
  if (c.emit.energies) {
    std::ostringstream csv;
    write_energies_csv(csv, rep);
    write_text(s.out() / "energies.csv", csv.str());
  }
  write_json(s.out() / "decay_report.json", to_json(rep));
  if (c.emit.states) write_states(s, rep);

  s.os() << "M = " << rep.M << ", K_max = " << o.K_max << ", feedback " << (o.feedback ? "on" : "off") << "\n";
  for (const auto& ms : rep.modes) {
    const double e0 = ms.energy.front(), eT = ms.energy.back();
    if (ms.diverged) s.os() << "mode " << mode_name(ms.mode) << " diverged\n";
    else if (eT > e0) s.os() << "mode " << mode_name(ms.mode) << " grew from " << num(e0) << " to " << num(eT) << "\n";
  }
  if (!rep.global.valid) {
    s.os() << "global fit unavailable (energy identically zero or not positive)\n";
    return kExitCriterion;
  }
  s.os() << "global eta = " << num(rep.global.eta) << ", C = " << num(rep.global.C)
         << (rep.global.truncated ? " (window truncated)" : "") << "\n"
         << "per-mode envelopes " << (rep.envelopes_ok ? "respected" : "violated") << "\n";
  return rep.pass() ? kExitPass : kExitCriterion;
}

int cmd_verify(Session& s, const std::vector<int>& ids) {
  RunConfig c = s.cfg();
  c.output_dir = s.out().string();
  c.threads = s.threads();
  VerifySuite suite(c);
  std::vector<CriterionResult> results;
  if (ids.empty()) {
    results = suite.run_all();
  } else {
    for (int id : ids) {
      if (id < 1 || id > kCriterionCount) throw Error(ErrorKind::Config, "criterion must be 1 to 9");
      results.push_back(suite.run(id));
    }
  }
  bool pass = true;
  nlohmann::json j = {{"schema", "channelstab.verify/1"}, {"results", nlohmann::json::array()}};
  for (const auto& r : results) {
    pass = pass && r.pass;
    j["results"].push_back(to_json(r));
    s.os() << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " " << r.name << ": " << r.detail << " ["
           << num(r.seconds) << " s]\n";
  }
  j["pass"] = pass;
  write_json(s.out() / "verify_report.json", j);
  return pass ? kExitPass : kExitCriterion;
}

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON configuration file");
  app->add_option("--out", f.out, "output directory (overrides CHANNELSTAB_OUT and the config)");
  app->add_option("--from", f.from, "directory with cached upstream artifacts");
  app->add_option("--threads", f.threads, "worker threads, 0 = available parallelism");
  app->add_option("--n", f.n, "collocation points");
  app->add_option("--nu", f.nu, "viscosity");
  app->add_option("--kappa", f.kappa, "kappa");
  app->add_option("--eps", f.eps, "interface width parameter");
  app->add_option("--alpha", f.alpha, "double-well strength");
  app->add_option("--rho0", f.rho0, "mobility");
  app->add_option("--C_U", f.C_U, "Poiseuille amplitude");
  app->add_option("--phi-tg", f.phi_tg, "target guess: kink, plus, minus or zero");
}

void add_spectral(CLI::App* app, Flags& f) {
  app->add_option("--scan-limit", f.scan_limit, "largest scanned mode radius");
  app->add_option("--eta", f.eta, "target decay rate");
}

void add_gain_flags(CLI::App* app, Flags& f) {
  app->add_option("--a", f.a, "forced actuator coefficient a as re,im");
  app->add_option("--b", f.b, "forced actuator coefficient b as re,im");
  app->add_option("--gamma-base", f.gamma_base, "base of the gamma sequence, 0 = automatic");
}

void add_sim_flags(CLI::App* app, Flags& f) {
  app->add_option("--T", f.T, "final time");
  app->add_option("--dt", f.dt, "time step");
  app->add_option("--K-max", f.K_max, "mode box half width, 0 = M + 2");
  app->add_option("--record-every", f.record_every, "steps between energy records");
  app->add_option("--seed", f.seed, "initial condition seed");
  app->add_option("--ic", f.ic, "random-smooth, unstable-eigenvector, single-mode or zero");
  app->add_option("--ic-mode", f.ic_mode, "mode k,l for single-mode and unstable-eigenvector");
  app->add_option("--amplitude", f.amplitude, "initial condition amplitude");
  app->add_option("--scheme", f.scheme, "trapezoid or tr-bdf2");
  app->add_option("--startup-steps", f.startup_steps, "backward Euler startup steps");
  app->add_flag("--no-feedback", f.no_feedback, "run every mode open loop");
  app->add_flag("--emit-states", f.emit_states, "dump state snapshots");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boundary feedback synthesis and verification for a sheared phase-field channel", "channelstab"};
  app.require_subcommand(1);
  Flags f;
  auto* steady = app.add_subcommand("steady", "compute the steady state");
  auto* spectrum = app.add_subcommand("spectrum", "scan mode spectra and determine the cutoff");
  auto* gains = app.add_subcommand("gains", "synthesize feedback gains");
  auto* simulate = app.add_subcommand("simulate", "integrate the mode box and fit the decay");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  for (auto* s : {steady, spectrum, gains, simulate, verify}) add_common(s, f);
  for (auto* s : {spectrum, gains, simulate, verify}) add_spectral(s, f);
  for (auto* s : {gains, simulate, verify}) add_gain_flags(s, f);
  for (auto* s : {simulate, verify}) add_sim_flags(s, f);
  spectrum->add_flag("--refine", f.refine, "rerun at 3n/2 and compare unstable counts");
  verify->add_option("--criterion", f.criteria, "criterion number, repeatable");

  std::vector<std::string> rest(args.rbegin(), args.rend());
  if (!rest.empty()) rest.pop_back();
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitPass : kExitConfig;
  }

  try {
    RunConfig cfg = build_config(f);
    const fs::path dir = f.out.empty() ? resolve_output_dir(cfg) : fs::path(f.out);
    Session s(cfg, dir, f.from, out);
    if (*steady) return cmd_steady(s);
    if (*spectrum) return cmd_spectrum(s, f.refine);
    if (*gains) return cmd_gains(s);
    if (*simulate) return cmd_simulate(s);
    return cmd_verify(s, f.criteria);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what();
    if (e.value() != 0.0) err << " [value " << num(e.value()) << "]";
    err << "\n";
    return exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error (config): " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error (internal): " << e.what() << "\n";
    return kExitNumeric;
  }
}

int run_cli(int argc, const char* const* argv) {
  return run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace cstab
