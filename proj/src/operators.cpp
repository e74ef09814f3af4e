#include "channelstab/operators.hpp"

#include <bit>
#include <fstream>

#include "channelstab/errors.hpp"

namespace cstab {

BcRows bc_rows(int n) { return {0, 1, n - 2, n - 1, n, 2 * n - 1}; }

RMat neumann_projector(const Grid& grid) {
  const int n = grid.n;
  Eigen::Matrix2d Bb;
  Bb << grid.D1(0, 0), grid.D1(0, n - 1), grid.D1(n - 1, 0), grid.D1(n - 1, n - 1);
  const RMat Bi = (RMat(2, n - 2) << grid.D1.row(0).segment(1, n - 2), grid.D1.row(n - 1).segment(1, n - 2)).finished();
  const RMat S = -Bb.inverse() * Bi;
  RMat P = RMat::Zero(n, n);
  for (int j = 1; j < n - 1; ++j) P(j, j) = 1.0;
  P.block(0, 1, 1, n - 2) = S.row(0);
  P.block(n - 1, 1, 1, n - 2) = S.row(1);
  return P;
}

namespace {

double q_of(ModeIndex m) { return double(m.k) * m.k + double(m.l) * m.l; }

CMat interior_L(ModeIndex mode, const Grid& g) {
  return (-g.D2 + q_of(mode) * RMat::Identity(g.n, g.n)).cast<cd>();
}

CMat interior_F(ModeIndex mode, const Grid& g, const RVec& U, const PhysParams& p) {
  const double q = q_of(mode);
  const cd ik = I_ * double(mode.k);
  const double Upp = -2.0 * p.C_U;
  CMat F = (p.nu * g.D4 - 2.0 * p.nu * q * g.D2).cast<cd>();
  for (int i = 0; i < g.n; ++i) {
    F.row(i) -= ik * U(i) * g.D2.row(i).cast<cd>();
    F(i, i) += p.nu * q * q + ik * q * U(i) + ik * Upp;
  }
  return F;
}

CMat interior_E(ModeIndex mode, const Grid& g, const RVec& U, double gamma, const PhysParams& p) {
  const double q = q_of(mode);
  const cd ik = I_ * double(mode.k);
  const RMat L = -g.D2 + q * RMat::Identity(g.n, g.n);
  CMat E = (-p.rho0 * p.eps * g.D2 * neumann_projector(g) * L + (p.rho0 * p.eps * q + gamma) * L).cast<cd>();
  for (int i = 0; i < g.n; ++i) E(i, i) += ik * U(i);
  return E;
}

void set_row(CMat& A, int r, const RVec& row, int col0) {
  A.row(r).setZero();
  A.block(r, col0, 1, row.size()) = row.transpose().cast<cd>();
}

ModePencil build(ModeIndex mode, const Grid& g, const SteadyState& s) {
  const int n = g.n;
  const PhysParams& p = s.params;
  const double q = q_of(mode);
  const RVec dphi = g.D1 * s.phi_inf;
  const RVec d3phi = g.D3 * s.phi_inf;
  const CMat L = interior_L(mode, g);

  ModePencil P;
  P.mode = mode;
  P.n = n;
  P.dim = 2 * n;
  P.nu = p.nu;
  P.M = CMat::Zero(2 * n, 2 * n);
  P.K = CMat::Zero(2 * n, 2 * n);
  P.M.topLeftCorner(n, n) = L;
  P.M.bottomRightCorner(n, n).setIdentity();
  P.K.topLeftCorner(n, n) = interior_F(mode, g, s.U, p);
  CMat C = L;
  for (int i = 0; i < n; ++i) {
    C.row(i) *= dphi(i);
    C(i, i) += d3phi(i);
  }
  P.K.topRightCorner(n, n) = -p.eps * p.kappa * q * C;
  for (int i = 0; i < n; ++i) P.K(n + i, i) = dphi(i);
  P.K.bottomRightCorner(n, n) = interior_E(mode, g, s.U, s.gamma, p);

  const BcRows b = bc_rows(n);
  const RVec e0 = RVec::Unit(n, 0), e1 = RVec::Unit(n, n - 1);
  for (int r : {b.v0, b.dv0, b.dv1, b.v1, b.dphi0, b.dphi1}) P.M.row(r).setZero();
  set_row(P.K, b.v0, e0, 0);
  set_row(P.K, b.dv0, g.D1.row(0).transpose(), 0);
  set_row(P.K, b.dv1, g.D1.row(n - 1).transpose(), 0);
  set_row(P.K, b.v1, e1, 0);
  set_row(P.K, b.dphi0, g.D1.row(0).transpose(), n);
  set_row(P.K, b.dphi1, g.D1.row(n - 1).transpose(), n);
  P.bc_rows = {b.v0, b.dv0, b.dv1, b.v1, b.dphi0, b.dphi1};

  // v'(0) = -ik s, v'(1) = -ik t
  P.input_s = CVec::Zero(2 * n);
  P.input_t = CVec::Zero(2 * n);
  P.input_s(b.dv0) = -I_ * double(mode.k);
  P.input_t(b.dv1) = -I_ * double(mode.k);
  return P;
}

}  // namespace

CMat assemble_L(ModeIndex mode, const Grid& grid) {
  CMat L = interior_L(mode, grid);
  set_row(L, 0, RVec::Unit(grid.n, 0), 0);
  set_row(L, grid.n - 1, RVec::Unit(grid.n, grid.n - 1), 0);
  return L;
}

CMat assemble_F(ModeIndex mode, const Grid& grid, const RVec& U, const PhysParams& params) {
  const int n = grid.n;
  CMat F = interior_F(mode, grid, U, params);
  set_row(F, 0, RVec::Unit(n, 0), 0);
  set_row(F, 1, grid.D1.row(0).transpose(), 0);
  set_row(F, n - 2, grid.D1.row(n - 1).transpose(), 0);
  set_row(F, n - 1, RVec::Unit(n, n - 1), 0);
  return F;
}

CMat assemble_E(ModeIndex mode, const Grid& grid, const RVec& U, double gamma, const PhysParams& params) {
  CMat E = interior_E(mode, grid, U, gamma, params);
  set_row(E, 0, grid.D1.row(0).transpose(), 0);
  set_row(E, grid.n - 1, grid.D1.row(grid.n - 1).transpose(), 0);
  return E;
}

ModePencil assemble_pencil(ModeIndex mode, const Grid& grid, const SteadyState& steady) {
  if (mode.k == 0)
    throw Error(ErrorKind::UnsupportedMode, "mode (0," + std::to_string(mode.l) +
                                                ") has no actuated pencil; use the k = 0 path");
  return build(mode, grid, steady);
}

ModePencil assemble_k0_pencil(int l, const Grid& grid, const SteadyState& steady) {
  if (l == 0) throw Error(ErrorKind::UnsupportedMode, "mode (0,0) has no velocity block; use assemble_phi00_pencil");
  ModePencil P = build({0, l}, grid, steady);
  P.input_s.setZero();
  P.input_t.setZero();
  return P;
}

ModePencil assemble_phi00_pencil(const Grid& grid, const SteadyState& steady) {
  const int n = grid.n;
  ModePencil P;
  P.mode = {0, 0};
  P.n = n;
  P.dim = n;
  P.nu = steady.params.nu;
  P.M = CMat::Identity(n, n);
  P.M.row(0).setZero();
  P.M.row(n - 1).setZero();
  P.K = assemble_E({0, 0}, grid, steady.U, steady.gamma, steady.params);
  P.bc_rows = {0, n - 1};
  P.input_s = CVec::Zero(n);
  P.input_t = CVec::Zero(n);
  return P;
}

namespace {
RVec stacked_weights(const Grid& g, int dim) {
  RVec w(dim);
  for (int i = 0; i < dim; ++i) w(i) = g.weights(i % g.n);
  return w;
}
CMat w_adjoint(const CMat& A, const RVec& w) {
  CMat B = A.adjoint();
  for (int i = 0; i < B.rows(); ++i) B.row(i) /= w(i);
  for (int j = 0; j < B.cols(); ++j) B.col(j) *= w(j);
  return B;
}
}  // namespace

PencilPair assemble_adjoint(const PencilPair& pair, const Grid& grid) {
  const RVec w = stacked_weights(grid, int(pair.M.rows()));
  return {w_adjoint(pair.M, w), w_adjoint(pair.K, w)};
}

PencilPair assemble_adjoint(const ModePencil& pencil, const Grid& grid) {
  return assemble_adjoint(PencilPair{pencil.M, pencil.K}, grid);
}

cd inner_stacked(const CVec& x, const CVec& y, const Grid& grid) {
  if (x.size() != y.size() || x.size() % grid.n != 0)
    throw Error(ErrorKind::InvalidArgument, "inner_stacked: incompatible vector lengths");
  cd s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += grid.weights(i % grid.n) * x(i) * std::conj(y(i));
  return s;
}

void export_pencil_binary(const ModePencil& pencil, const std::string& stem) {
  static_assert(std::endian::native == std::endian::little, "binary export assumes a little-endian host");
  nlohmann::json h = {{"schema", "channelstab.pencil/1"},
                      {"mode", {pencil.mode.k, pencil.mode.l}},
                      {"dim", pencil.dim},
                      {"n", pencil.n},
                      {"bc_rows", pencil.bc_rows},
                      {"matrices", {"M", "K"}},
                      {"layout", "row-major"},
                      {"dtype", "complex128-le"},
                      {"data_file", stem.substr(stem.find_last_of('/') + 1) + ".bin"}};
  std::ofstream js(stem + ".json");
  js << h.dump(2) << '\n';
  std::ofstream bin(stem + ".bin", std::ios::binary);
  for (const CMat* A : {&pencil.M, &pencil.K})
    for (int i = 0; i < A->rows(); ++i)
      for (int j = 0; j < A->cols(); ++j) {
        const double re = (*A)(i, j).real(), im = (*A)(i, j).imag();
        bin.write(reinterpret_cast<const char*>(&re), sizeof re);
        bin.write(reinterpret_cast<const char*>(&im), sizeof im);
      }
  if (!js || !bin) throw Error(ErrorKind::Numeric, "failed to write pencil export " + stem);
}

}  // namespace cstab
