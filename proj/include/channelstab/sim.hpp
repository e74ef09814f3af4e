#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "channelstab/pipeline.hpp"

namespace cstab {

// Mode (0,0) carries (u, w, phi) with v = 0; every other mode carries
// (v, phi, eta) with eta = il u - ik w, and u, w are recovered from v' and eta.
struct ModeState {
  ModeIndex mode;
  CVec v, phi, u, w, eta;
  double t = 0.0;
};

// Time-invariant descriptor system M x' + K x = 0 for one mode, with the
// feedback (if any) already folded into the algebraic rows.
struct AugmentedSystem {
  ModeIndex mode;
  int n = 0;
  int dim = 0;
  CMat M;
  CMat K;
  std::vector<int> bc_rows;
  bool controlled = false;
  RVec conserved;  // c with c x invariant, c of length dim, empty when there is none
  RVec conserved_dir;  // state direction carrying the invariant, c conserved_dir = 1
};

AugmentedSystem augmented_system(const ModePencil& pencil, const Grid& grid, const SteadyState& steady,
                                 const GainSet* gains = nullptr);
AugmentedSystem augmented_system_00(const Grid& grid, const SteadyState& steady);
// Dispatch on the mode: (0,0), k = 0 or actuated.
AugmentedSystem mode_system(ModeIndex mode, const Grid& grid, const SteadyState& steady,
                            const GainSet* gains = nullptr);

CVec pack(const ModeState& s);
ModeState unpack(const CVec& x, ModeIndex mode, const Grid& grid, double t = 0.0);

// u = (ik v' - il eta)/q, w = (il v' + ik eta)/q, q = k^2 + l^2.
std::pair<CVec, CVec> recover_tangential(const ModeState& state, const Grid& grid);

struct ComponentEnergy {
  double u = 0.0, v = 0.0, w = 0.0, phi = 0.0;
  double total() const { return u + v + w + phi; }
};
ComponentEnergy component_energy(const ModeState& s, const Grid& grid);
double mode_energy(const ModeState& s, const Grid& grid);

// Trapezoid (default) or TR-BDF2.
enum class Scheme { TrBdf2, Trapezoid };
Scheme parse_scheme(const std::string& s);
std::string to_string(Scheme s);

// One-step propagator x_{m+1} = P x_m with the algebraic rows imposed at every
// stage. The first startup_steps steps are each replaced by two backward Euler
// half steps.
class ModeStepper {
 public:
  ModeStepper(const AugmentedSystem& sys, double dt, Scheme scheme = Scheme::Trapezoid, int startup_steps = 0);
  CVec step(const CVec& x);
  double dt() const { return dt_; }
  const CMat& propagator() const { return P_; }

 private:
  CMat P_;
  CMat P_half_;
  double dt_;
  int startup_;
  int taken_ = 0;
  ModeIndex mode_;
};

ModeState step_closed_loop(const ModeState& state, const ModePencil& pencil, const GainSet& gains, const Grid& grid,
                           const SteadyState& steady, double dt, Scheme scheme = Scheme::Trapezoid);
ModeState step_open_loop_k0(const ModeState& state, const Grid& grid, const SteadyState& steady, double dt,
                            Scheme scheme = Scheme::Trapezoid);

// Solves (C S) x = -C y, S a low-degree polynomial basis per block and
// C the algebraic rows. Returns y + S x.
CVec project_bc(const AugmentedSystem& sys, const Grid& grid, const CVec& y);

struct InitialCondition {
  std::string recipe = "random-smooth";  // random-smooth | unstable-eigenvector | single-mode | zero
  std::uint64_t seed = 1;
  std::optional<ModeIndex> mode;
  double amplitude = 1.0;
};

// First eight Chebyshev polynomials on [0,1] with uniform coefficients in [-1,1]
// drawn from a generator keyed by (seed, k, l, block).
CVec random_smooth_block(const Grid& grid, std::uint64_t seed, ModeIndex mode, int block, bool real);
// Row r with r phi conserved by the k = l = 0 concentration dynamics and r 1 = 1.
RVec phi00_mean_functional(const Grid& grid, const SteadyState& steady);
CVec random_smooth_state(const AugmentedSystem& sys, const Grid& grid, const SteadyState& steady, std::uint64_t seed);

struct DecayFit {
  double C = 0.0;          // exp(intercept) / E(0)
  double amplitude = 0.0;  // exp(intercept)
  double eta = 0.0;
  double envelope_max = 0.0;  // max over the window of E(t) e^{eta t / 2} / E(0)
  int points = 0;
  bool truncated = false;
  bool valid = false;
};

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& E, double transient_fraction = 0.1);

// Upper envelope env(t) = max_{s >= t} E(s) must satisfy
// env(t) <= env(t0) exp(-rate (t - t0)) (1 + tol) for t >= t0.
bool envelope_decays(const std::vector<double>& t, const std::vector<double>& E, double rate, double t0,
                     double tol = 1e-9);

struct SimOptions {
  int K_max = 4;
  double T = 10.0;
  double dt = 1e-3;
  int record_every = 10;
  InitialCondition ic;
  bool feedback = true;
  int threads = 1;
  Scheme scheme = Scheme::Trapezoid;
  int startup_steps = 2;
  bool keep_states = false;
};

struct ModeSeries {
  ModeIndex mode;
  bool controlled = false;
  bool diverged = false;
  int multiplicity = 2;  // 1 for (0,0), 2 for a mode and its conjugate
  std::vector<double> energy;
  DecayFit fit;
  bool envelope_ok = true;  // decay at half its own fitted rate after the transient window
  std::vector<CVec> states;
};

struct DecayReport {
  int M = 1;
  SimOptions options;
  std::vector<double> times;
  std::vector<ModeSeries> modes;
  std::vector<double> total;  // (2 pi)^2 sum over the full box
  DecayFit global;
  bool envelopes_ok = true;
  bool pass() const { return global.valid && global.eta > 0.0; }
};

// Canonical half of the box |k|, |l| <= K_max: (0,0), k = 0 with l > 0, k > 0.
std::vector<ModeIndex> box_modes(int K_max);

DecayReport run_simulation(const SimOptions& opt, const Grid& grid, const SteadyState& steady,
                           const ControlSet& controls);

void write_energies_csv(std::ostream& os, const DecayReport& r);
nlohmann::json to_json(const DecayReport& r);
nlohmann::json to_json(const DecayFit& f);

}  // namespace cstab
