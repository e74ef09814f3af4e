#pragma once

#include <utility>
#include <vector>

#include "channelstab/spectra.hpp"

namespace cstab {

// Gain conventions (see docs/formats.md):
//   l_j      = Z*_j''(0) + a Z*_j''(1)
//   c_j      = nu l_j                      (wall weight seen by mode j)
//   R        = conj(c) c^T,  R_i = Lambda_i R conj(Lambda_i),  Rbig = (sum R_i)^-1
//   Omega    = sum_i (Lambda_sum Rbig Z)_i c_i,  Lambda_sum = conj(sum Lambda_i)
// With these, the unstable coordinates obey Z' = -(sum gamma_i R_i) Rbig Z.
struct GainSet {
  ModeIndex mode;
  cd actuator{1.0, 0.0};
  double margin = 1.0;  // actuator margin of the family this mode belongs to
  std::vector<double> gammas;
  std::vector<double> sigma_ratio;  // certification of each lifting solve
  CVec lambdas;                     // unstable eigenvalues
  CVec l_vec;
  CVec c_vec;
  CMat Lambda_sum;
  std::vector<CMat> R_i;
  CMat R_big;
  double cond_R = 1.0;
  CVec row_functional;  // Omega(x) = sum_r row_functional(r) x(r)
  double reduced_abscissa = 0.0;
  double lifting_residual = 0.0;
  bool empty() const { return gammas.empty(); }
};

std::vector<double> gammas_from_base(int N, double base);

// Smallest base allowed for the eigenset: 10 (1 + max |lambda_j|) over unstable j.
double minimal_gamma_base(const EigenSet& eig);

// Bordered lifting system for gamma: [K + gamma M, 2 lambda_j M x_j; -f_j, 1].
CMat lifting_matrix(double gamma, const ModePencil& pencil, const EigenSet& eig, const Grid& grid);

// sigma_min / sigma_max of the row-equilibrated lifting matrix.
double lifting_sigma_ratio(double gamma, const ModePencil& pencil, const EigenSet& eig, const Grid& grid);

std::vector<double> choose_gamma_sequence(const EigenSet& eig, const ModePencil& pencil, const Grid& grid,
                                          double base = 0.0, std::vector<double>* ratios = nullptr);

struct RParts {
  CMat R;
  std::vector<CMat> Lambdas;
  std::vector<CMat> R_i;
  CMat R_big;
  CMat Lambda_sum;
  double cond = 1.0;
};

RParts build_R_matrices(const CVec& c_vec, const CVec& lambdas, const std::vector<double>& gammas);

// (V, Phi) with V'(0) = -psi, V'(1) = conj(a) psi.
CVec lifting_solve(double gamma, cd psi, const ModePencil& pencil, const EigenSet& eig, const Grid& grid, cd a);

GainSet build_gains(const EigenSet& eig, const ModePencil& pencil, const Grid& grid, cd actuator,
                    double base = 0.0);

// Vector of <(L v, phi), (Z*_j, Phi*_j)> over unstable j.
CVec projections(const CVec& state, const EigenSet& eig, const ModePencil& pencil, const Grid& grid);

cd omega(const CVec& state, const GainSet& gains, const EigenSet& eig, const ModePencil& pencil, const Grid& grid);
cd omega_row(const CVec& state, const GainSet& gains);

std::pair<cd, cd> boundary_values(cd omega, ModeIndex mode, const ActuatorChoice& choice);

CMat reduced_matrix(const GainSet& gains);

// Largest relative mismatch of the lifting identity
// <(L V, Phi), (Z*_j, Phi*_j)> = -psi nu conj(l_j) / (lambda_j + gamma_i).
double lifting_residual(const GainSet& gains, const EigenSet& eig, const ModePencil& pencil, const Grid& grid,
                    cd psi = cd(1.0, 0.5));

// Pencil with the feedback folded into the wall-slope rows.
ModePencil closed_loop_pencil(const ModePencil& pencil, const GainSet& gains);

nlohmann::json to_json(const GainSet& g);
GainSet gains_from_json(const nlohmann::json& j);

}  // namespace cstab
