#include "channelstab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "channelstab/errors.hpp"
#include "channelstab/io.hpp"
#include "channelstab/parallel.hpp"

namespace cstab {

namespace {

std::string mode_str(ModeIndex m) { return "(" + std::to_string(m.k) + "," + std::to_string(m.l) + ")"; }

bool is_00(ModeIndex m) { return m.k == 0 && m.l == 0; }

ModeIndex canonical(ModeIndex m) {
  if (m.k < 0 || (m.k == 0 && m.l < 0)) return {-m.k, -m.l};
  return m;
}

void heat_block(CMat& M, CMat& K, int off, const Grid& g, double nu) {
  const int n = g.n;
  for (int i = 1; i < n - 1; ++i) {
    M(off + i, off + i) = 1.0;
    for (int j = 0; j < n; ++j) K(off + i, off + j) = -nu * g.D2(i, j);
  }
  K(off, off) = 1.0;
  K(off + n - 1, off + n - 1) = 1.0;
}

}  // namespace

AugmentedSystem augmented_system(const ModePencil& pencil, const Grid& grid, const SteadyState& steady,
                                 const GainSet* gains) {
  const ModeIndex m = pencil.mode;
  if (is_00(m)) return augmented_system_00(grid, steady);
  const bool controlled = gains && !gains->empty();
  if (controlled && (!(gains->mode == m) || m.k == 0))
    throw Error(ErrorKind::InvalidArgument, "gains for " + mode_str(gains->mode) + " applied to mode " + mode_str(m));
  const int n = grid.n, D = 3 * n;
  const double q = double(m.k * m.k + m.l * m.l), nu = steady.params.nu;
  const RVec dU = grid.D1 * steady.U;

  AugmentedSystem s;
  s.mode = m;
  s.n = n;
  s.dim = D;
  s.controlled = controlled;
  s.M = CMat::Zero(D, D);
  s.K = CMat::Zero(D, D);
  s.M.topLeftCorner(2 * n, 2 * n) = pencil.M;
  s.K.topLeftCorner(2 * n, 2 * n) = controlled ? closed_loop_pencil(pencil, *gains).K : pencil.K;
  const int e = 2 * n;
  for (int i = 1; i < n - 1; ++i) {
    s.M(e + i, e + i) = 1.0;
    for (int j = 0; j < n; ++j) s.K(e + i, e + j) = -nu * grid.D2(i, j);
    s.K(e + i, e + i) += nu * q + I_ * double(m.k) * steady.U(i);
    s.K(e + i, i) = I_ * double(m.l) * dU(i);
  }
  // eta(0) = il s, eta(1) = il t
  s.K(e, e) = 1.0;
  s.K(e + n - 1, e + n - 1) = 1.0;
  if (controlled) {
    const double r = double(m.l) / double(m.k);
    s.K.row(e).head(2 * n) -= r * gains->row_functional.transpose();
    s.K.row(e + n - 1).head(2 * n) += r * std::conj(gains->actuator) * gains->row_functional.transpose();
  }
  s.bc_rows = pencil.bc_rows;
  s.bc_rows.push_back(e);
  s.bc_rows.push_back(e + n - 1);
  return s;
}

AugmentedSystem augmented_system_00(const Grid& grid, const SteadyState& steady) {
  const int n = grid.n, D = 3 * n;
  AugmentedSystem s;
  s.mode = {0, 0};
  s.n = n;
  s.dim = D;
  s.M = CMat::Zero(D, D);
  s.K = CMat::Zero(D, D);
  heat_block(s.M, s.K, 0, grid, steady.params.nu);
  heat_block(s.M, s.K, n, grid, steady.params.nu);
  const ModePencil p = assemble_phi00_pencil(grid, steady);
  s.M.bottomRightCorner(n, n) = p.M;
  s.K.bottomRightCorner(n, n) = p.K;
  s.bc_rows = {0, n - 1, n, 2 * n - 1};
  for (int r : p.bc_rows) s.bc_rows.push_back(2 * n + r);
  s.conserved = RVec::Zero(D);
  s.conserved.tail(n) = phi00_mean_functional(grid, steady);
  s.conserved_dir = RVec::Zero(D);
  s.conserved_dir.tail(n).setOnes();
  return s;
}

AugmentedSystem mode_system(ModeIndex mode, const Grid& grid, const SteadyState& steady, const GainSet* gains) {
  if (is_00(mode)) return augmented_system_00(grid, steady);
  if (mode.k == 0) {
    if (gains && !gains->empty()) throw Error(ErrorKind::InvalidArgument, "k = 0 modes run open loop");
    return augmented_system(assemble_k0_pencil(mode.l, grid, steady), grid, steady);
  }
  return augmented_system(assemble_pencil(mode, grid, steady), grid, steady, gains);
}

CVec pack(const ModeState& s) {
  const bool z = is_00(s.mode);
  const CVec& a = z ? s.u : s.v;
  const CVec& b = z ? s.w : s.phi;
  const CVec& c = z ? s.phi : s.eta;
  const Eigen::Index n = std::max({a.size(), b.size(), c.size()});
  CVec x = CVec::Zero(3 * n);
  if (a.size() == n) x.segment(0, n) = a;
  if (b.size() == n) x.segment(n, n) = b;
  if (c.size() == n) x.segment(2 * n, n) = c;
  return x;
}

ModeState unpack(const CVec& x, ModeIndex mode, const Grid& grid, double t) {
  const int n = grid.n;
  if (x.size() != 3 * n) throw Error(ErrorKind::InvalidArgument, "unpack: state length does not match grid");
  ModeState s;
  s.mode = mode;
  s.t = t;
  if (is_00(mode)) {
    s.u = x.segment(0, n);
    s.w = x.segment(n, n);
    s.phi = x.segment(2 * n, n);
    s.v = CVec::Zero(n);
    s.eta = CVec::Zero(n);
    return s;
  }
  s.v = x.segment(0, n);
  s.phi = x.segment(n, n);
  s.eta = x.segment(2 * n, n);
  std::tie(s.u, s.w) = recover_tangential(s, grid);
  return s;
}

std::pair<CVec, CVec> recover_tangential(const ModeState& state, const Grid& grid) {
  const int k = state.mode.k, l = state.mode.l;
  if (k == 0 && l == 0) throw Error(ErrorKind::InvalidArgument, "recover_tangential: mode (0,0) has no eta companion");
  const double q = double(k * k + l * l);
  const CVec dv = grid.D1.cast<cd>() * state.v;
  const cd ik = I_ * double(k), il = I_ * double(l);
  return {(ik * dv - il * state.eta) / q, (il * dv + ik * state.eta) / q};
}

ComponentEnergy component_energy(const ModeState& s, const Grid& grid) {
  ComponentEnergy e;
  if (s.u.size()) e.u = norm2(s.u, grid);
  if (s.v.size()) e.v = norm2(s.v, grid);
  if (s.w.size()) e.w = norm2(s.w, grid);
  if (s.phi.size()) e.phi = norm2(s.phi, grid);
  return e;
}

double mode_energy(const ModeState& s, const Grid& grid) { return component_energy(s, grid).total(); }

namespace {

CMat solve_step(const AugmentedSystem& sys, CMat A, CMat B) {
  for (int r : sys.bc_rows) {
    A.row(r) = sys.K.row(r);
    B.row(r).setZero();
  }
  for (int i = 0; i < A.rows(); ++i) {
    const double s = A.row(i).cwiseAbs().maxCoeff();
    if (s > 0.0) {
      A.row(i) /= s;
      B.row(i) /= s;
    }
  }
  const Eigen::PartialPivLU<CMat> lu(A);
  CMat P = lu.solve(B);
  P += lu.solve(B - A * P);
  if (!P.allFinite() || !(std::abs(lu.determinant()) > 0.0))
    throw Error(ErrorKind::Numeric, "singular step matrix on mode " + mode_str(sys.mode));
  return P;
}

// Rank-one update so that c P = c holds to rounding.
void conserve(CMat& P, const AugmentedSystem& sys) {
  if (sys.conserved.size() == 0) return;
  const CVec c = sys.conserved.cast<cd>();
  const CVec defect = c - P.transpose() * c;
  P += sys.conserved_dir.cast<cd>() * defect.transpose();
}

CMat trapezoid_propagator(const AugmentedSystem& sys, double h) {
  return solve_step(sys, sys.M / h + 0.5 * sys.K, sys.M / h - 0.5 * sys.K);
}

CMat euler_propagator(const AugmentedSystem& sys, double h) { return solve_step(sys, sys.M / h + sys.K, sys.M / h); }

// Trapezoid to t + g h, then BDF2 through (t, t + g h, t + h), g = 2 - sqrt 2.
CMat trbdf2_propagator(const AugmentedSystem& sys, double h) {
  const double g = 2.0 - std::numbers::sqrt2;
  const CMat P1 = trapezoid_propagator(sys, g * h);
  const double a = 1.0 / (g * (2.0 - g)), b = (1.0 - g) * (1.0 - g) / (g * (2.0 - g)), c = (1.0 - g) / (2.0 - g);
  return solve_step(sys, sys.M + (c * h) * sys.K, sys.M * (a * P1 - b * CMat::Identity(sys.dim, sys.dim)));
}

}  // namespace

Scheme parse_scheme(const std::string& s) {
  if (s == "tr-bdf2") return Scheme::TrBdf2;
  if (s == "trapezoid") return Scheme::Trapezoid;
  throw Error(ErrorKind::Config, "scheme must be tr-bdf2 or trapezoid");
}

std::string to_string(Scheme s) { return s == Scheme::TrBdf2 ? "tr-bdf2" : "trapezoid"; }

ModeStepper::ModeStepper(const AugmentedSystem& sys, double dt, Scheme scheme, int startup_steps)
    : dt_(dt), startup_(startup_steps), mode_(sys.mode) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  P_ = scheme == Scheme::TrBdf2 ? trbdf2_propagator(sys, dt) : trapezoid_propagator(sys, dt);
  if (startup_ > 0) P_half_ = euler_propagator(sys, 0.5 * dt);
  conserve(P_, sys);
  if (startup_ > 0) conserve(P_half_, sys);
}

CVec ModeStepper::step(const CVec& x) {
  CVec y;
  if (taken_ < startup_) {
    const CVec h = P_half_ * x;
    y.noalias() = P_half_ * h;
  } else {
    y.noalias() = P_ * x;
  }
  ++taken_;
  if (!y.allFinite())
    throw Error(ErrorKind::Numeric, "non-finite state on mode " + mode_str(mode_) + " at step " + std::to_string(taken_));
  return y;
}

ModeState step_closed_loop(const ModeState& state, const ModePencil& pencil, const GainSet& gains, const Grid& grid,
                           const SteadyState& steady, double dt, Scheme scheme) {
  if (pencil.mode.k == 0) throw Error(ErrorKind::InvalidArgument, "step_closed_loop requires k != 0");
  ModeStepper st(augmented_system(pencil, grid, steady, &gains), dt, scheme);
  return unpack(st.step(pack(state)), state.mode, grid, state.t + dt);
}

ModeState step_open_loop_k0(const ModeState& state, const Grid& grid, const SteadyState& steady, double dt,
                            Scheme scheme) {
  if (state.mode.k != 0) throw Error(ErrorKind::InvalidArgument, "step_open_loop_k0 requires k = 0");
  ModeStepper st(mode_system(state.mode, grid, steady), dt, scheme);
  return unpack(st.step(pack(state)), state.mode, grid, state.t + dt);
}

CVec project_bc(const AugmentedSystem& sys, const Grid& grid, const CVec& y) {
  const int n = grid.n, m = int(sys.bc_rows.size());
  const RVec& x = grid.nodes;
  // Block kinds: 0 clamped (v), 1 Neumann (phi), 2 Dirichlet (eta, u, w).
  const int kinds[3] = {is_00(sys.mode) ? 2 : 0, is_00(sys.mode) ? 2 : 1, is_00(sys.mode) ? 1 : 2};
  CMat S = CMat::Zero(sys.dim, m);
  int col = 0;
  for (int b = 0; b < 3; ++b) {
    const int first = kinds[b] == 1 ? 1 : 0;
    const int count = kinds[b] == 0 ? 4 : 2;
    for (int p = first; p < first + count; ++p, ++col) {
      if (col >= m) throw Error(ErrorKind::InvalidArgument, "project_bc: more basis functions than rows");
      for (int i = 0; i < n; ++i) S(b * n + i, col) = std::pow(x(i), p);
    }
  }
  if (col != m) throw Error(ErrorKind::InvalidArgument, "project_bc: basis does not match the algebraic rows");
  CMat C(m, sys.dim);
  for (int r = 0; r < m; ++r) C.row(r) = sys.K.row(sys.bc_rows[r]);
  const Eigen::FullPivLU<CMat> lu(C * S);
  if (!lu.isInvertible()) throw Error(ErrorKind::Numeric, "project_bc: singular correction system");
  return y + S * lu.solve(-(C * y));
}

CVec random_smooth_block(const Grid& grid, std::uint64_t seed, ModeIndex mode, int block, bool real) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(mode.k), std::uint32_t(mode.l),
                    std::uint32_t(block)};
  std::mt19937_64 gen(seq);
  const auto uni = [&] { return double(gen() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  cd c[8];
  for (auto& ci : c) {
    const double re = uni();
    const double im = real ? 0.0 : uni();
    ci = {re, im};
  }
  CVec f(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double s = 2.0 * grid.nodes(i) - 1.0;
    double t0 = 1.0, t1 = s;
    cd acc = c[0] * t0 + c[1] * t1;
    for (int m = 2; m < 8; ++m) {
      const double t2 = 2.0 * s * t1 - t0;
      acc += c[m] * t2;
      t0 = t1;
      t1 = t2;
    }
    f(i) = acc;
  }
  return f;
}

RVec phi00_mean_functional(const Grid& grid, const SteadyState& steady) {
  const ModePencil p = assemble_phi00_pencil(grid, steady);
  const RMat K = p.K.real(), M = p.M.real();
  const Eigen::JacobiSVD<RMat> svd(K, Eigen::ComputeFullU);
  const RVec y = svd.matrixU().col(grid.n - 1);
  RVec r = M.transpose() * y;
  return r / r.sum();
}

CVec random_smooth_state(const AugmentedSystem& sys, const Grid& grid, const SteadyState& steady,
                         std::uint64_t seed) {
  const int n = grid.n;
  const bool real = is_00(sys.mode);
  CVec x(sys.dim);
  for (int b = 0; b < 3; ++b) x.segment(b * n, n) = random_smooth_block(grid, seed, sys.mode, b, real);
  x = project_bc(sys, grid, x);
  if (real) {
    const cd mean = phi00_mean_functional(grid, steady).cast<cd>().dot(x.segment(2 * n, n));
    x.segment(2 * n, n).array() -= mean;
  }
  return x;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& E, double transient_fraction) {
  if (t.size() != E.size()) throw Error(ErrorKind::InvalidArgument, "fit_decay: length mismatch");
  DecayFit f;
  if (t.size() < 2 || !(E[0] > 0.0) || !std::isfinite(E[0])) return f;
  const double t_start = t.front() + transient_fraction * (t.back() - t.front());
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_start) continue;
    if (!(E[i] > 1e-280) || !std::isfinite(E[i])) {
      f.truncated = true;
      break;
    }
    xs.push_back(t[i]);
    ys.push_back(std::log(E[i]));
  }
  f.points = int(xs.size());
  if (f.points < 2 && f.truncated && transient_fraction > 0.0) {
    // underflow before the window opens: fall back to the whole record
    DecayFit g = fit_decay(t, E, 0.0);
    g.truncated = true;
    return g;
  }
  if (f.points < 2) return f;
  const double N = double(f.points);
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < f.points; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= N;
  my /= N;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < f.points; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) return f;
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  f.eta = -slope;
  f.amplitude = std::exp(intercept);
  f.C = f.amplitude / E[0];
  for (int i = 0; i < f.points; ++i)
    f.envelope_max = std::max(f.envelope_max, std::exp(ys[i] + 0.5 * f.eta * xs[i]) / E[0]);
  f.valid = true;
  return f;
}

bool envelope_decays(const std::vector<double>& t, const std::vector<double>& E, double rate, double t0,
                     double tol) {
  std::size_t first = 0;
  while (first < t.size() && t[first] < t0) ++first;
  if (first >= t.size()) return true;
  std::vector<double> env(t.size() - first);
  double run = 0.0;
  for (std::size_t i = t.size(); i-- > first;) {
    if (!std::isfinite(E[i])) return false;
    run = std::max(run, E[i]);
    env[i - first] = run;
  }
  const double e0 = env[0];
  if (e0 == 0.0) return true;
  for (std::size_t i = 0; i < env.size(); ++i)
    if (env[i] > e0 * std::exp(-rate * (t[first + i] - t[first])) * (1.0 + tol)) return false;
  return true;
}

std::vector<ModeIndex> box_modes(int K_max) {
  std::vector<ModeIndex> out{{0, 0}};
  for (int l = 1; l <= K_max; ++l) out.push_back({0, l});
  for (int k = 1; k <= K_max; ++k)
    for (int l = -K_max; l <= K_max; ++l) out.push_back({k, l});
  return out;
}

namespace {

CVec initial_vector(const AugmentedSystem& sys, const Grid& grid, const SteadyState& steady, const InitialCondition& ic,
                    const EigenSet* eig) {
  const ModeIndex m = sys.mode;
  const double q = double(m.k * m.k + m.l * m.l);
  const bool selected = !ic.mode || canonical(*ic.mode) == m;
  if (ic.recipe == "zero") return CVec::Zero(sys.dim);
  if (ic.recipe == "random-smooth") return random_smooth_state(sys, grid, steady, ic.seed) * (ic.amplitude / (1.0 + q));
  if (ic.recipe == "single-mode") {
    if (!ic.mode) throw Error(ErrorKind::Config, "single-mode initial condition needs a mode");
    return selected ? CVec(random_smooth_state(sys, grid, steady, ic.seed) * ic.amplitude) : CVec::Zero(sys.dim);
  }
  if (ic.recipe == "unstable-eigenvector") {
    if (!selected || !eig || eig->N_unstable == 0) return CVec::Zero(sys.dim);
    CVec x = CVec::Zero(sys.dim);
    x.head(2 * grid.n) = eig->right.col(0);
    x = project_bc(sys, grid, x);
    const double e = mode_energy(unpack(x, m, grid), grid);
    return x * std::sqrt(ic.amplitude / e);
  }
  throw Error(ErrorKind::Config, "unknown initial condition recipe '" + ic.recipe + "'");
}

}  // namespace

DecayReport run_simulation(const SimOptions& opt, const Grid& grid, const SteadyState& steady,
                           const ControlSet& controls) {
  if (!(opt.T > 0.0) || !(opt.dt > 0.0) || opt.record_every < 1 || opt.K_max < 1)
    throw Error(ErrorKind::Config, "simulation needs T, dt, record_every and K_max positive");
  DecayReport rep;
  rep.M = controls.M;
  rep.options = opt;
  const auto modes = box_modes(opt.K_max);
  const long steps = std::lround(opt.T / opt.dt);
  const long records = steps / opt.record_every + 1;
  for (long r = 0; r < records; ++r) rep.times.push_back(double(r * opt.record_every) * opt.dt);

  rep.modes.resize(modes.size());
  parallel_for(int(modes.size()), opt.threads, [&](int i) {
    const ModeIndex m = modes[i];
    ModeSeries& ms = rep.modes[i];
    ms.mode = m;
    ms.multiplicity = is_00(m) ? 1 : 2;
    const GainSet* g = opt.feedback ? controls.gains_for(m) : nullptr;
    ms.controlled = g && !g->empty();
    const AugmentedSystem sys = mode_system(m, grid, steady, ms.controlled ? g : nullptr);
    CVec x = initial_vector(sys, grid, steady, opt.ic, controls.eig_for(m));
    ModeStepper st(sys, opt.dt, opt.scheme, opt.startup_steps);
    ms.energy.reserve(records);
    for (long s = 0;; ++s) {
      if (s % opt.record_every == 0) {
        const double e = mode_energy(unpack(x, m, grid), grid);
        if (!std::isfinite(e) || e > 1e250) {
          ms.diverged = true;
          ms.energy.resize(records, std::numeric_limits<double>::infinity());
          break;
        }
        ms.energy.push_back(e);
        if (opt.keep_states) ms.states.push_back(x);
      }
      if (s == steps) break;
      if (x.squaredNorm() < 1e-280) x.setZero();
      x = st.step(x);
    }
  });

  rep.total.assign(records, 0.0);
  const double fac = 4.0 * std::numbers::pi * std::numbers::pi;
  for (const auto& ms : rep.modes)
    for (long r = 0; r < records; ++r) rep.total[r] += fac * ms.multiplicity * ms.energy[r];
  rep.global = fit_decay(rep.times, rep.total);
  const double t0 = 0.1 * opt.T;
  for (auto& ms : rep.modes) {
    ms.fit = fit_decay(rep.times, ms.energy);
    if (ms.energy.front() == 0.0 && !ms.diverged)
      ms.envelope_ok = std::all_of(ms.energy.begin(), ms.energy.end(), [](double e) { return e == 0.0; });
    else
      ms.envelope_ok = !ms.diverged && ms.fit.valid && ms.fit.eta > 0.0 &&
                       envelope_decays(rep.times, ms.energy, 0.5 * ms.fit.eta, t0);
    rep.envelopes_ok = rep.envelopes_ok && ms.envelope_ok;
  }
  return rep;
}

void write_energies_csv(std::ostream& os, const DecayReport& r) {
  os << 't';
  for (const auto& ms : r.modes) os << ",E_" << ms.mode.k << '_' << ms.mode.l;
  os << ",total\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    os << fmt(r.times[i]);
    for (const auto& ms : r.modes) os << ',' << fmt(ms.energy[i]);
    os << ',' << fmt(r.total[i]) << '\n';
  }
}

nlohmann::json to_json(const DecayFit& f) {
  return {{"C", f.C},
          {"amplitude", f.amplitude},
          {"eta", f.eta},
          {"envelope_max", f.envelope_max},
          {"points", f.points},
          {"truncated", f.truncated},
          {"valid", f.valid}};
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const DecayReport& r) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& ms : r.modes) {
    const double e0 = ms.energy.front(), eT = ms.energy.back();
    modes.push_back({{"mode", {ms.mode.k, ms.mode.l}},
                     {"controlled", ms.controlled},
                     {"multiplicity", ms.multiplicity},
                     {"E0", finite_or_null(e0)},
                     {"ET", finite_or_null(eT)},
                     {"grew", !(eT <= e0)},
                     {"diverged", ms.diverged},
                     {"fit", to_json(ms.fit)},
                     {"envelope_ok", ms.envelope_ok}});
  }
  const auto& o = r.options;
  nlohmann::json ic = {{"recipe", o.ic.recipe}, {"seed", o.ic.seed}, {"amplitude", o.ic.amplitude}};
  if (o.ic.mode) ic["mode"] = {o.ic.mode->k, o.ic.mode->l};
  return {{"schema", "channelstab.decay/1"},
          {"M", r.M},
          {"K_max", o.K_max},
          {"T", o.T},
          {"dt", o.dt},
          {"record_every", o.record_every},
          {"scheme", to_string(o.scheme)},
          {"startup_steps", o.startup_steps},
          {"feedback", o.feedback},
          {"ic", ic},
          {"energy_factor", "(2 pi)^2"},
          {"global", to_json(r.global)},
          {"envelopes_ok", r.envelopes_ok},
          {"pass", r.pass()},
          {"modes", modes}};
}

}  // namespace cstab
