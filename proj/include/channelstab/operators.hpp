#pragma once

#include <string>
#include <vector>

#include "channelstab/steady.hpp"

namespace cstab {

// Generalized evolution M x' + K x = 0 on the stacked state (v, phi).
// Rows listed in bc_rows are algebraic and have zero mass. Boundary data
// enters as K x = input_s * s + input_t * t on those rows.
struct ModePencil {
  ModeIndex mode;
  int n = 0;
  int dim = 0;
  CMat M;
  CMat K;
  std::vector<int> bc_rows;
  CVec input_s;
  CVec input_t;
  double nu = 1.0;
};

struct PencilPair {
  CMat M;
  CMat K;
};

// Row indices of the boundary conditions inside the stacked (v, phi) state.
struct BcRows {
  int v0, dv0, dv1, v1, dphi0, dphi1;
};
BcRows bc_rows(int n);

// Maps psi to psi with its two end values replaced so that D1 psi vanishes
// at both walls. Used to carry the third-derivative wall conditions of phi
// inside the E block.
RMat neumann_projector(const Grid& grid);

CMat assemble_L(ModeIndex mode, const Grid& grid);
CMat assemble_F(ModeIndex mode, const Grid& grid, const RVec& U, const PhysParams& params);
CMat assemble_E(ModeIndex mode, const Grid& grid, const RVec& U, double gamma, const PhysParams& params);

// k != 0 only.
ModePencil assemble_pencil(ModeIndex mode, const Grid& grid, const SteadyState& steady);

// Same coupled (v, phi) system for k = 0, l != 0, with homogeneous clamped walls.
ModePencil assemble_k0_pencil(int l, const Grid& grid, const SteadyState& steady);

// k = l = 0 concentration block: phi' + E_00 phi = 0 with Neumann rows.
ModePencil assemble_phi00_pencil(const Grid& grid, const SteadyState& steady);

// Adjoint with respect to the weighted product diag(w, w):
// M* = W^-1 M^H W, K* = W^-1 K^H W.
PencilPair assemble_adjoint(const ModePencil& pencil, const Grid& grid);
PencilPair assemble_adjoint(const PencilPair& pair, const Grid& grid);

// <x, y>_W on stacked vectors (block weights repeated).
cd inner_stacked(const CVec& x, const CVec& y, const Grid& grid);

// Writes stem.json (header) and stem.bin (M then K, row-major, complex128 LE).
void export_pencil_binary(const ModePencil& pencil, const std::string& stem);

}  // namespace cstab
