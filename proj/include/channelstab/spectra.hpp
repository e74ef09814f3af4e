#pragma once

#include <ostream>
#include <utility>
#include <vector>

#include "channelstab/operators.hpp"

namespace cstab {

struct EigenOptions {
  bool vectors = true;
  double margin_unstable = 1e-8;
  double infinite_cut = 1e12;
};

struct EigenSet {
  ModeIndex mode;
  CVec lambdas;  // eigenvalues of -A, descending real part, ties ascending imaginary part
  CMat right;    // columns (v, phi)
  CMat left;     // columns (Z*, Phi*) = W^-1 y, y the left eigenvector of the pencil
  int N_unstable = 0;
  std::vector<std::pair<cd, cd>> traces;  // (Z*''(0), Z*''(1)) per unstable j
  double pairing_condition = 1.0;
  bool near_defective = false;
  double max_backward_error = 0.0;
  int n = 0;
};

// Finite eigenvalues of lambda M x + K x = 0, sorted.
CVec pencil_eigenvalues(const ModePencil& pencil, double infinite_cut = 1e12);
double spectral_abscissa(const CVec& lambdas);

EigenSet solve_pencil_eigen(const ModePencil& pencil, const Grid& grid, const EigenOptions& opt = {});

// <(L v, phi), (Z*, Phi*)>_W, i.e. the weighted product of M x against z.
cd pairing(const ModePencil& pencil, const Grid& grid, const CVec& x, const CVec& z);
CMat pairing_matrix(const ModePencil& pencil, const Grid& grid, const CMat& X, const CMat& Z);

// Keeps left vectors, recombines the first N_unstable right vectors so the
// pairing block is the identity.
EigenSet biorthonormalize(EigenSet eig, const ModePencil& pencil, const Grid& grid);

double backward_error(const ModePencil& pencil, cd lambda, const CVec& x);

// Wall traces of the dual functions read from the slope-row multipliers:
// y[dv0] = nu Z*''(0), y[dv1] = -nu Z*''(1), with y = W Z*.
std::vector<std::pair<cd, cd>> boundary_traces(const EigenSet& eig, const ModePencil& pencil, const Grid& grid);

// (f''(0), f''(1)) of a grid function via the end rows of D2.
std::pair<cd, cd> second_derivative_traces(const CVec& f, const Grid& grid);

struct TraceRecord {
  ModeIndex mode;
  int j = 0;
  cd t0;
  cd t1;
};

struct CoefficientChoice {
  cd value{1.0, 0.0};
  double margin = 1.0;
};

struct ActuatorChoice {
  cd a{1.0, 0.0};
  cd b{1.0, 0.0};
  double margin_a = 1.0;
  double margin_b = 1.0;
  double margin() const { return std::min(margin_a, margin_b); }
  cd for_mode(ModeIndex m) const { return m.l == 0 ? b : a; }
};

// 360 unit-modulus angles times moduli {1/2, 1, 2}, in that order.
std::vector<cd> actuator_candidates();
double coefficient_margin(const std::vector<TraceRecord>& traces, cd a);
CoefficientChoice select_actuator_coefficient(const std::vector<TraceRecord>& traces, double threshold = 1e-10);

ModePencil mode_pencil(ModeIndex mode, const Grid& grid, const SteadyState& steady);

struct ModeScan {
  ModeIndex mode;
  double abscissa = 0.0;
  int N_unstable = 0;
};

struct CutoffResult {
  int M = 1;
  double worst_beyond = 0.0;  // largest abscissa among modes beyond M
  std::vector<ModeScan> scan;
};

// Half plane k > 0 (all l) and k = 0, l > 0, with radius <= limit.
std::vector<ModeIndex> scan_modes(int limit);

std::vector<ModeScan> scan_spectra(const SteadyState& steady, const Grid& grid, int scan_limit, int threads = 1,
                                   double margin_unstable = 1e-8);
int cutoff_from_scan(const std::vector<ModeScan>& scan, double eta, int scan_limit, double* worst_beyond = nullptr);
CutoffResult determine_cutoff(const SteadyState& steady, const Grid& grid, double eta, int scan_limit,
                              int threads = 1);

void write_spectrum_csv_header(std::ostream& os);
void write_spectrum_csv(std::ostream& os, ModeIndex mode, const CVec& lambdas, int N_unstable,
                        const std::vector<std::pair<cd, cd>>& traces);

}  // namespace cstab
