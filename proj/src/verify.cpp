#include "channelstab/verify.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "channelstab/cli.hpp"
#include "channelstab/errors.hpp"
#include "channelstab/io.hpp"
#include "channelstab/parallel.hpp"

namespace cstab {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string mode_name(ModeIndex m) { return "(" + std::to_string(m.k) + "," + std::to_string(m.l) + ")"; }

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Adds a combination of y, y^2, y^3, y^4 so that f' and f''' vanish at both walls.
CVec wall_neumann(const CVec& f, const Grid& g) {
  const int n = g.n;
  CMat S(n, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < n; ++i) S(i, j) = std::pow(g.nodes(i), j + 1);
  CMat C(4, n);
  C.row(0) = g.D1.row(0).cast<cd>();
  C.row(1) = g.D1.row(n - 1).cast<cd>();
  C.row(2) = g.D3.row(0).cast<cd>();
  C.row(3) = g.D3.row(n - 1).cast<cd>();
  const CVec c = (C * S).fullPivLu().solve(-C * f);
  return f + S * c;
}

// Modes of the canonical half plane with radius <= M, (0,0) included.
std::vector<ModeIndex> modes_within(int M) {
  std::vector<ModeIndex> out;
  for (const auto& m : box_modes(M))
    if (m.k * m.k + m.l * m.l <= M * M) out.push_back(m);
  return out;
}

struct Trajectory {
  std::vector<double> t;
  std::vector<ModeState> states;
};

Trajectory integrate(const AugmentedSystem& sys, const Grid& grid, CVec x, double dt, double T, int record_every,
                     int startup) {
  ModeStepper st(sys, dt, Scheme::Trapezoid, startup);
  const long steps = std::lround(T / dt);
  Trajectory tr;
  for (long s = 0;; ++s) {
    if (s % record_every == 0) {
      tr.t.push_back(double(s) * dt);
      tr.states.push_back(unpack(x, sys.mode, grid, double(s) * dt));
    }
    if (s == steps) break;
    x = st.step(x);
  }
  return tr;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = read_text(e.path());
  return files;
}

}  // namespace

std::string criterion_name(int id) {
  switch (id) {
    case 1: return "analytic spectra";
    case 2: return "adjoint identity";
    case 3: return "biorthonormality";
    case 4: return "lifting identity";
    case 5: return "spectral gap beyond cutoff";
    case 6: return "closed-loop spectrum";
    case 7: return "trajectory decay";
    case 8: return "k=0 branch rates";
    case 9: return "determinism";
    default: return "unknown";
  }
}

VerifySuite::VerifySuite(RunConfig cfg) : cfg_(std::move(cfg)), threads_(resolve_threads(cfg_.threads)) {}

const Grid& VerifySuite::grid() {
  if (!grid_) grid_ = build_grid(cfg_.n);
  return *grid_;
}

const SteadyState& VerifySuite::steady() {
  if (!steady_) steady_ = build_steady(cfg_.params, grid(), parse_target_guess(cfg_.phi_tg));
  return *steady_;
}

const CutoffResult& VerifySuite::cutoff() {
  if (!cutoff_) {
    const auto t0 = Clock::now();
    steady();
    cutoff_ = determine_cutoff(steady(), grid(), cfg_.eta_target, cfg_.scan_limit, threads_);
    cutoff_seconds_ = seconds_since(t0);
  }
  return *cutoff_;
}

const ControlSet& VerifySuite::controls() {
  if (!controls_) {
    ControlOptions o;
    o.threads = threads_;
    o.a = cfg_.actuator_a;
    o.b = cfg_.actuator_b;
    o.gamma_base = cfg_.gamma_base;
    controls_ = build_controls(steady(), grid(), cutoff().M, o);
  }
  return *controls_;
}

CriterionResult VerifySuite::run(int id) {
  const auto t0 = Clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = analytic_spectra(); break;
      case 2: r = adjoint_identity(); break;
      case 3: r = biorthonormality(); break;
      case 4: r = lifting_identity(); break;
      case 5: r = spectral_gap(); break;
      case 6: r = closed_loop_spectrum(); break;
      case 7: r = trajectory_decay(); break;
      case 8: r = k0_branch(); break;
      case 9: r = determinism(); break;
      default: throw Error(ErrorKind::InvalidArgument, "no criterion " + std::to_string(id));
    }
  } catch (const Error& e) {
    r.pass = false;
    r.detail = std::string(to_string(e.kind())) + ": " + e.what();
  }
  r.id = id;
  r.name = criterion_name(id);
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CriterionResult> VerifySuite::run_all() {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run(id));
  return out;
}

CriterionResult VerifySuite::analytic_spectra() {
  const Grid& g = grid();
  const int n = g.n;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double worst_L = 0.0;
  for (ModeIndex m : {ModeIndex{1, 0}, ModeIndex{1, 1}, ModeIndex{2, -1}, ModeIndex{0, 3}, ModeIndex{3, 2}}) {
    const CMat L = assemble_L(m, g).block(1, 1, n - 2, n - 2);
    Eigen::ComplexEigenSolver<CMat> es(L, false);
    std::vector<double> ev;
    for (int i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i).real());
    std::sort(ev.begin(), ev.end());
    const double q = m.k * m.k + m.l * m.l;
    for (int j = 1; j <= 5; ++j) worst_L = std::max(worst_L, rel_err(ev[j - 1], j * j * pi2 + q));
  }
  const SteadyState& st = steady();
  const CVec lam = pencil_eigenvalues(assemble_phi00_pencil(g, st));
  const double a = st.params.rho0 * st.params.eps;
  double worst_A = 0.0;
  for (int j = 1; j <= 4; ++j) {
    const double exact = a * j * j * j * j * pi2 * pi2 + st.gamma * j * j * pi2;
    worst_A = std::max(worst_A, rel_err(-lam(j).real(), exact));
  }
  CriterionResult r;
  r.pass = worst_L <= 1e-8 && worst_A <= 1e-7 && std::abs(lam(0)) <= 1e-8;
  r.detail = "n=" + std::to_string(n) + ", L-block rel err " + num(worst_L) + " (tol 1e-8), A00 rel err " +
             num(worst_A) + " (tol 1e-7), A00 null eigenvalue " + num(std::abs(lam(0)));
  return r;
}

CriterionResult VerifySuite::adjoint_identity() {
  const Grid& g = grid();
  const SteadyState& st = steady();
  const int n = g.n;
  const auto modes = modes_within(cutoff().M);
  std::vector<double> worst(modes.size(), 0.0);
  parallel_for(int(modes.size()), threads_, [&](int i) {
    const ModeIndex m = modes[i];
    const ModePencil p = mode_pencil(m, g, st);
    const CMat Ks = assemble_adjoint(p, g).K;
    const AugmentedSystem sys = mode_system(m, g, st);
    const bool zero = m.k == 0 && m.l == 0;
    // Clamped v and phi' = phi''' = 0, the wall conditions of the fourth-order blocks.
    auto sample = [&](std::uint64_t seed) -> CVec {
      const CVec phi = wall_neumann(random_smooth_block(g, seed, m, 1, zero), g);
      if (zero) return phi;
      CVec x = random_smooth_state(sys, g, st, seed).head(2 * n);
      x.segment(n, n) = phi;
      return x;
    };
    for (int pair = 0; pair < 100; ++pair) {
      const CVec x = sample(2 * pair + 1), y = sample(2 * pair + 2);
      const cd lhs = inner_stacked(p.K * x, y, g);
      const cd rhs = inner_stacked(x, Ks * y, g);
      worst[i] = std::max(worst[i], std::abs(lhs - rhs) / std::abs(lhs));
    }
  });
  const double w = *std::max_element(worst.begin(), worst.end());
  CriterionResult r;
  r.pass = w <= 1e-8;
  r.detail = std::to_string(modes.size()) + " modes x 100 pairs, worst rel mismatch " + num(w) + " (tol 1e-8)";
  return r;
}

CriterionResult VerifySuite::biorthonormality() {
  const ControlSet& cs = controls();
  double worst = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < cs.eigs.size(); ++i) {
    const EigenSet& e = cs.eigs[i];
    if (e.N_unstable == 0) continue;
    ++count;
    const int N = e.N_unstable;
    const CMat P = pairing_matrix(cs.pencils[i], grid(), e.right.leftCols(N), e.left.leftCols(N));
    worst = std::max(worst, (P - CMat::Identity(N, N)).cwiseAbs().maxCoeff());
  }
  CriterionResult r;
  r.pass = count > 0 && worst <= 1e-8;
  r.detail = std::to_string(count) + " controlled modes, max |P - I| " + num(worst) + " (tol 1e-8)";
  return r;
}

CriterionResult VerifySuite::lifting_identity() {
  const ControlSet& cs = controls();
  double worst = 0.0;
  std::string per_mode;
  int count = 0;
  for (std::size_t i = 0; i < cs.eigs.size(); ++i) {
    const GainSet& g = cs.gains[i];
    if (g.empty()) continue;
    ++count;
    const double e = lifting_residual(g, cs.eigs[i], cs.pencils[i], grid());
    worst = std::max(worst, e);
    per_mode += " " + mode_name(g.mode) + "=" + num(e);
  }
  CriterionResult r;
  r.pass = count > 0 && worst <= 1e-6;
  r.detail = std::to_string(count) + " controlled modes, rel residual" + per_mode + " (tol 1e-6)";
  return r;
}

CriterionResult VerifySuite::spectral_gap() {
  CriterionResult r;
  const CutoffResult& c = cutoff();
  int unstable = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : c.scan) {
    unstable += s.N_unstable;
    if (s.mode.radius() > c.M) worst = std::max(worst, s.abscissa);
  }
  r.pass = unstable > 0 && worst <= -cfg_.eta_target && cutoff_seconds_ <= 120.0;
  r.detail = "C_U=" + num(cfg_.params.C_U) + ", M=" + std::to_string(c.M) + ", unstable eigenvalues " +
             std::to_string(unstable) + ", worst abscissa beyond M " + num(worst) + " (need <= " +
             num(-cfg_.eta_target) + "), scan " + num(cutoff_seconds_) + " s (limit 120)";
  return r;
}

CriterionResult VerifySuite::closed_loop_spectrum() {
  const ControlSet& cs = controls();
  double worst = -std::numeric_limits<double>::infinity();
  double worst_reduced = -std::numeric_limits<double>::infinity();
  std::string per_mode;
  for (std::size_t i = 0; i < cs.eigs.size(); ++i) {
    const GainSet& g = cs.gains[i];
    const ModePencil p = g.empty() ? cs.pencils[i] : closed_loop_pencil(cs.pencils[i], g);
    const double a = spectral_abscissa(pencil_eigenvalues(p));
    worst = std::max(worst, a);
    if (!g.empty()) worst_reduced = std::max(worst_reduced, g.reduced_abscissa);
    per_mode += " " + mode_name(cs.eigs[i].mode) + "=" + num(a);
  }
  CriterionResult r;
  r.pass = worst <= -cfg_.eta_target && worst_reduced < 0.0;
  r.detail = "abscissa" + per_mode + " (need <= " + num(-cfg_.eta_target) + "), worst reduced-matrix abscissa " +
             num(worst_reduced);
  return r;
}

CriterionResult VerifySuite::trajectory_decay() {
  const auto t0 = Clock::now();
  SimOptions o;
  o.K_max = cfg_.K_max > 0 ? cfg_.K_max : cutoff().M + 2;
  o.T = cfg_.T;
  o.dt = cfg_.dt;
  o.record_every = cfg_.record_every;
  o.ic = cfg_.ic;
  o.ic.recipe = "random-smooth";
  o.threads = threads_;
  o.scheme = parse_scheme(cfg_.scheme);
  o.startup_steps = cfg_.startup_steps;
  const DecayReport closed = run_simulation(o, grid(), steady(), controls());
  int controlled = 0, controlled_decayed = 0, bad_env = 0;
  for (const auto& ms : closed.modes) {
    if (!ms.envelope_ok) ++bad_env;
    if (!ms.controlled) continue;
    ++controlled;
    if (ms.energy.back() < ms.energy.front()) ++controlled_decayed;
  }
  o.feedback = false;
  const DecayReport open = run_simulation(o, grid(), steady(), controls());
  std::string grown;
  for (const auto& ms : open.modes)
    if (ms.diverged || ms.energy.back() > ms.energy.front()) grown += " " + mode_name(ms.mode);
  const double secs = seconds_since(t0);
  CriterionResult r;
  r.pass = closed.pass() && closed.envelopes_ok && controlled_decayed == controlled && !grown.empty() &&
           secs <= 600.0;
  r.detail = "K_max=" + std::to_string(o.K_max) + ", global eta " + num(closed.global.eta) + ", C " +
             num(closed.global.C) + ", envelope violations " + std::to_string(bad_env) + ", controlled modes decayed " +
             std::to_string(controlled_decayed) + "/" + std::to_string(controlled) + ", open loop grew:" +
             (grown.empty() ? std::string(" none") : grown) + ", " + num(secs) + " s (limit 600)";
  return r;
}

CriterionResult VerifySuite::k0_branch() {
  const Grid& g = grid();
  const SteadyState& st = steady();
  const int n = g.n;
  const double dt = cfg_.dt;

  // Oracles from the operators themselves.
  const RMat heat = -st.params.nu * g.D2.block(1, 1, n - 2, n - 2);
  const auto hev = heat.eigenvalues();
  double heat_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < hev.size(); ++i) heat_min = std::min(heat_min, hev(i).real());
  const CVec lam00 = pencil_eigenvalues(assemble_phi00_pencil(g, st));
  double phi_abs = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < lam00.size(); ++i)
    if (std::abs(lam00(i)) > 1e-8) phi_abs = std::max(phi_abs, lam00(i).real());
  const double k01_abs = spectral_abscissa(pencil_eigenvalues(assemble_k0_pencil(1, g, st)));

  const AugmentedSystem s00 = mode_system({0, 0}, g, st);
  const Trajectory t00 =
      integrate(s00, g, random_smooth_state(s00, g, st, cfg_.ic.seed), dt, 1.0, 10, cfg_.startup_steps);
  const AugmentedSystem s01 = mode_system({0, 1}, g, st);
  const Trajectory t01 =
      integrate(s01, g, random_smooth_state(s01, g, st, cfg_.ic.seed), dt, cfg_.T, 10, cfg_.startup_steps);

  auto series = [&](const Trajectory& tr, auto pick) {
    std::vector<double> e;
    for (const auto& s : tr.states) e.push_back(pick(component_energy(s, g)));
    return fit_decay(tr.t, e);
  };
  struct Check {
    const char* what;
    DecayFit fit;
    double oracle;
  };
  const Check checks[] = {
      {"u00", series(t00, [](const ComponentEnergy& c) { return c.u; }), 2.0 * heat_min},
      {"w00", series(t00, [](const ComponentEnergy& c) { return c.w; }), 2.0 * heat_min},
      {"phi00", series(t00, [](const ComponentEnergy& c) { return c.phi; }), -2.0 * phi_abs},
      {"(v,phi)01", series(t01, [](const ComponentEnergy& c) { return c.v + c.phi; }), -2.0 * k01_abs},
  };
  CriterionResult r;
  r.pass = true;
  for (const auto& c : checks) {
    const double e = rel_err(c.fit.eta, c.oracle);
    r.pass = r.pass && c.fit.valid && e <= 0.1;
    if (!r.detail.empty()) r.detail += ", ";
    r.detail += std::string(c.what) + " fitted " + num(c.fit.eta) + " vs " + num(c.oracle);
  }
  r.detail += " (energy rates, tol 10%)";
  return r;
}

CriterionResult VerifySuite::determinism() {
  const fs::path base = fs::path(cfg_.output_dir) / "determinism";
  const fs::path run_dir = base / "run";
  ensure_dir(base);
  RunConfig c = cfg_;
  c.output_dir = run_dir.string();
  write_json(base / "config.json", to_json(c));
  const std::vector<std::vector<std::string>> commands = {
      {"channelstab", "spectrum", "--config", (base / "config.json").string(), "--out", run_dir.string()},
      {"channelstab", "simulate", "--config", (base / "config.json").string(), "--out", run_dir.string(), "--T",
       "1"},
  };
  std::vector<std::map<std::string, std::string>> snaps;
  std::vector<std::string> logs;
  std::vector<int> codes;
  for (int rep = 0; rep < 2; ++rep) {
    fs::remove_all(run_dir);
    std::ostringstream out, err;
    for (const auto& cmd : commands) codes.push_back(run_cli(cmd, out, err));
    snaps.push_back(snapshot(run_dir));
    logs.push_back(out.str());
  }
  std::string differing;
  for (const auto& [name, bytes] : snaps[0]) {
    auto it = snaps[1].find(name);
    if (it == snaps[1].end() || it->second != bytes) differing += " " + name;
  }
  for (const auto& [name, bytes] : snaps[1])
    if (!snaps[0].count(name)) differing += " " + name;
  const bool codes_ok = codes[0] == codes[2] && codes[1] == codes[3] && codes[0] == 0 && codes[1] == 0;
  CriterionResult r;
  r.pass = differing.empty() && codes_ok && logs[0] == logs[1] && !snaps[0].empty();
  r.detail = std::to_string(snaps[0].size()) + " files compared" +
             (differing.empty() ? std::string(", all identical") : ", differing:" + differing) + ", exit codes " +
             std::to_string(codes[0]) + "/" + std::to_string(codes[1]) + " and " + std::to_string(codes[2]) + "/" +
             std::to_string(codes[3]) + (logs[0] == logs[1] ? "" : ", console output differs");
  return r;
}

nlohmann::json to_json(const CriterionResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}};
}

}  // namespace cstab
