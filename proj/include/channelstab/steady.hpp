#pragma once

#include <string>

#include "channelstab/grid.hpp"
#include "json.hpp"

namespace cstab {

struct PhysParams {
  double nu = 1.0;
  double kappa = 1.0;
  double eps = 0.01;
  double alpha = 1.0;
  double rho0 = 1.0;
  double C_U = 2.0e5;

  void validate() const;
};

struct SteadyState {
  RVec U;
  RVec phi_tg;
  RVec phi_inf;
  double gamma = 0.0;
  PhysParams params;
  bool h0 = false;
  double residual = 0.0;
  double upsilon = 0.0;
};

enum class TargetGuess { Kink, PlusOne, MinusOne, Zero };

RVec poiseuille(const PhysParams& params, const Grid& grid);

RVec initial_guess(TargetGuess guess, const PhysParams& params, const Grid& grid);

// Upsilon(phi) = int eps/2 |phi'|^2 + alpha (phi^2-1)^2/4
double upsilon(const RVec& phi, const PhysParams& params, const Grid& grid);

// max-norm of -eps D2 phi + alpha (phi^3 - phi) over the interior rows
double target_residual(const RVec& phi, const PhysParams& params, const Grid& grid);

RVec solve_target_concentration(const PhysParams& params, const Grid& grid, const RVec& init);

// Semi-implicit gradient flow of Upsilon with Neumann rows, run until the
// residual drops below tol or max_steps is reached.
RVec gradient_flow(const PhysParams& params, const Grid& grid, const RVec& init, double tol, int max_steps);

RVec antisymmetric_part(const RVec& phi_tg, const Grid& grid);

double gamma_coefficient(const RVec& phi_tg, const PhysParams& params, const Grid& grid);

bool check_H0(const RVec& phi_tg, const Grid& grid);

SteadyState build_steady(const PhysParams& params, const Grid& grid, TargetGuess guess = TargetGuess::Kink);

nlohmann::json to_json(const PhysParams& p);
PhysParams params_from_json(const nlohmann::json& j, PhysParams base = {});
nlohmann::json to_json(const SteadyState& s, const Grid& grid);
SteadyState steady_from_json(const nlohmann::json& j, const Grid& grid);

}  // namespace cstab
