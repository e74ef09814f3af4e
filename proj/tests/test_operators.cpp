#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "channelstab/errors.hpp"
#include "channelstab/io.hpp"
#include "channelstab/spectra.hpp"
#include "fixtures.hpp"

using namespace cstab;

namespace {

const double pi = std::numbers::pi;

CVec sample(const Grid& g, double (*f)(double)) {
  CVec v(g.n);
  for (int i = 0; i < g.n; ++i) v(i) = f(g.nodes(i));
  return v;
}

double interior_max(const CVec& v) { return v.segment(1, v.size() - 2).cwiseAbs().maxCoeff(); }

SteadyState flat_steady(const Grid& g) {
  SteadyState s = fixtures::steady64();
  s.phi_inf = RVec::Zero(g.n);
  return s;
}

ModePencil sub_pencil(const ModePencil& p, int off, int n, std::vector<int> bc) {
  ModePencil s = p;
  s.n = n;
  s.dim = n;
  s.M = p.M.block(off, off, n, n);
  s.K = p.K.block(off, off, n, n);
  s.bc_rows = std::move(bc);
  return s;
}

}  // namespace

TEST_CASE("boundary row layout") {
  const BcRows b = bc_rows(64);
  CHECK(b.v0 == 0);
  CHECK(b.dv0 == 1);
  CHECK(b.dv1 == 62);
  CHECK(b.v1 == 63);
  CHECK(b.dphi0 == 64);
  CHECK(b.dphi1 == 127);
}

TEST_CASE("L block on sin(pi y)") {
  const Grid g = build_grid(32);
  const CVec s = sample(g, [](double y) { return std::sin(pi * y); });
  CHECK(interior_max(assemble_L({0, 0}, g) * s - pi * pi * s) <= 1e-8);
  CHECK(interior_max(assemble_L({1, 1}, g) * s - (pi * pi + 2.0) * s) <= 1e-8);
}

TEST_CASE("Dirichlet L spectrum") {
  const Grid& g = fixtures::grid64();
  const int n = g.n;
  for (ModeIndex m : {ModeIndex{0, 0}, ModeIndex{1, 2}, ModeIndex{3, 0}}) {
    const CMat L = assemble_L(m, g).block(1, 1, n - 2, n - 2);
    Eigen::ComplexEigenSolver<CMat> es(L, false);
    std::vector<double> ev;
    for (int i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i).real());
    std::sort(ev.begin(), ev.end());
    const double q = m.k * m.k + m.l * m.l;
    for (int j = 1; j <= 5; ++j) CHECK(std::abs(ev[j - 1] - (j * j * pi * pi + q)) <= 1e-8 * (j * j * pi * pi + q));
  }
}

TEST_CASE("F block at k = 0 is nu (D2 - l^2)^2") {
  const Grid g = build_grid(32);
  PhysParams p;
  p.nu = 1.7;
  const RVec U = poiseuille(p, g);
  const RMat A = g.D2 - 4.0 * RMat::Identity(g.n, g.n);
  const CMat F = assemble_F({0, 2}, g, U, p);
  const CMat ref = (p.nu * A * A).cast<cd>();
  const double scale = ref.cwiseAbs().maxCoeff();
  CHECK((F - ref).block(2, 0, g.n - 4, g.n).cwiseAbs().maxCoeff() <= 1e-10 * scale);
}

TEST_CASE("F block on y^2 (1-y)^2 at k = l = 0") {
  const Grid g = build_grid(32);
  PhysParams p;
  p.nu = 1.0;
  const CVec f = sample(g, [](double y) { return y * y * (1 - y) * (1 - y); });
  const CVec r = assemble_F({0, 0}, g, poiseuille(p, g), p) * f;
  CHECK((r.segment(2, g.n - 4).array() - 24.0).abs().maxCoeff() <= 1e-7);
  CHECK(std::abs(r(0)) <= 1e-14);
  CHECK(std::abs(r(1)) <= 1e-10);
}

TEST_CASE("E block at k = l = 0 has the cosine eigenpairs") {
  const Grid g = build_grid(32);
  const PhysParams p;
  const double gamma = 1.3;
  const CMat E = assemble_E({0, 0}, g, poiseuille(p, g), gamma, p);
  for (int m = 1; m <= 4; ++m) {
    CVec c(g.n);
    for (int i = 0; i < g.n; ++i) c(i) = std::cos(m * pi * g.nodes(i));
    const double mu = p.rho0 * p.eps * std::pow(m * pi, 4) + gamma * std::pow(m * pi, 2);
    CHECK(interior_max(E * c - mu * c) <= 1e-7 * mu);
  }
  CHECK(interior_max(E * CVec::Ones(g.n)) <= 1e-14 * E.cwiseAbs().rowwise().sum().maxCoeff());
}

TEST_CASE("E block at (1,0) on cos(pi y)") {
  const Grid& g = fixtures::grid64();
  const SteadyState& s = fixtures::steady64();
  const PhysParams& p = s.params;
  const CMat E = assemble_E({1, 0}, g, s.U, s.gamma, p);
  CVec c(g.n), ref(g.n);
  const double q = 1.0, a = p.rho0 * p.eps;
  for (int i = 0; i < g.n; ++i) {
    c(i) = std::cos(pi * g.nodes(i));
    ref(i) = (a * std::pow(pi, 4) + (2 * a * q + s.gamma) * pi * pi + a * q * q + s.gamma * q + I_ * s.U(i)) * c(i);
  }
  CHECK(interior_max(E * c - ref) <= 1e-7 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("pencil decouples without the steady concentration gradient") {
  const Grid& g = fixtures::grid64();
  const int n = g.n;
  const ModePencil P = assemble_pencil({1, 1}, g, flat_steady(g));
  CHECK(P.K.topRightCorner(n, n).cwiseAbs().maxCoeff() == 0.0);
  CHECK(P.K.bottomLeftCorner(n, n).cwiseAbs().maxCoeff() == 0.0);
  CHECK(P.M.topRightCorner(n, n).cwiseAbs().maxCoeff() == 0.0);

  const CVec full = pencil_eigenvalues(P);
  const CVec ev = pencil_eigenvalues(sub_pencil(P, 0, n, {0, 1, n - 2, n - 1}));
  const CVec ep = pencil_eigenvalues(sub_pencil(P, n, n, {0, n - 1}));
  std::vector<cd> merged(ev.data(), ev.data() + ev.size());
  merged.insert(merged.end(), ep.data(), ep.data() + ep.size());
  std::stable_sort(merged.begin(), merged.end(), [](cd a, cd b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  REQUIRE(full.size() == Eigen::Index(merged.size()));
  for (int j = 0; j < 12; ++j)
    if (std::abs(merged[j]) <= 1e3) CHECK(std::abs(full(j) - merged[j]) <= 1e-7 * std::abs(merged[j]));
}

TEST_CASE("pencil of (-k,-l) is the conjugate of (k,l)") {
  const Grid& g = fixtures::grid64();
  const SteadyState& s = fixtures::steady64();
  const ModePencil a = assemble_pencil({2, 1}, g, s);
  const ModePencil b = assemble_pencil({-2, -1}, g, s);
  CHECK((a.K.conjugate() - b.K).cwiseAbs().maxCoeff() <= 1e-15 * a.K.cwiseAbs().maxCoeff());
  CHECK((a.M.conjugate() - b.M).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b.input_s - a.input_s.conjugate()).norm() == 0.0);
}

TEST_CASE("input maps and algebraic rows") {
  const Grid& g = fixtures::grid64();
  const SteadyState& s = fixtures::steady64();
  const ModePencil P = assemble_pencil({3, -1}, g, s);
  const BcRows b = bc_rows(g.n);
  CHECK(P.dim == 2 * g.n);
  CHECK(P.input_s(b.dv0) == cd(0.0, -3.0));
  CHECK(P.input_t(b.dv1) == cd(0.0, -3.0));
  CHECK(P.input_s.cwiseAbs().sum() == 3.0);
  for (int r : P.bc_rows) CHECK(P.M.row(r).cwiseAbs().maxCoeff() == 0.0);
  const ModePencil K0 = assemble_k0_pencil(2, g, s);
  CHECK(K0.input_s.cwiseAbs().maxCoeff() == 0.0);
  CHECK(K0.input_t.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(assemble_pencil({0, 1}, g, s), Error);
  CHECK_THROWS_AS(assemble_k0_pencil(0, g, s), Error);
  const ModePencil P00 = assemble_phi00_pencil(g, s);
  CHECK(P00.dim == g.n);
  CHECK(P00.K.imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("weighted adjoint") {
  const Grid& g = fixtures::grid64();
  const SteadyState& s = fixtures::steady64();
  const ModePencil P = assemble_pencil({1, 1}, g, s);
  const PencilPair A = assemble_adjoint(P, g);
  const PencilPair AA = assemble_adjoint(A, g);
  CHECK((AA.K - P.K).cwiseAbs().maxCoeff() <= 1e-12 * P.K.cwiseAbs().maxCoeff());
  CHECK((AA.M - P.M).cwiseAbs().maxCoeff() <= 1e-12 * P.M.cwiseAbs().maxCoeff());

  Eigen::Index dim = P.dim;
  for (int seed = 1; seed <= 5; ++seed) {
    std::srand(unsigned(seed));
    const CVec x = CVec::Random(dim), y = CVec::Random(dim);
    const CVec Kx = P.K * x, Ky = A.K * y;
    const cd lhs = inner_stacked(Kx, y, g);
    const cd rhs = inner_stacked(x, Ky, g);
    const double scale = std::sqrt(std::abs(inner_stacked(Kx, Kx, g)) * std::abs(inner_stacked(y, y, g)));
    CHECK(std::abs(lhs - rhs) <= 1e-13 * scale);
  }
}

TEST_CASE("left eigenvectors solve the conjugate-transposed pencil") {
  const Grid& g = fixtures::grid64();
  const ModePencil P = assemble_pencil({1, 1}, g, fixtures::steady64());
  const EigenSet e = solve_pencil_eigen(P, g);
  for (int j = 0; j < 5; ++j) {
    CVec y = e.left.col(j);
    for (int i = 0; i < y.size(); ++i) y(i) *= g.weights(i % g.n);
    const CVec r = (e.lambdas(j) * P.M + P.K).adjoint() * y;
    CHECK(r.norm() <= 1e-14 * (std::abs(e.lambdas(j)) * P.M.norm() + P.K.norm()) * y.norm());
  }
}

TEST_CASE("dense binary export") {
  const Grid g = build_grid(16);
  const SteadyState s = build_steady(PhysParams{}, g);
  const ModePencil P = assemble_pencil({1, 0}, g, s);
  const auto dir = std::filesystem::temp_directory_path() / "channelstab_export_test";
  std::filesystem::create_directories(dir);
  export_pencil_binary(P, (dir / "p").string());
  const nlohmann::json h = read_json(dir / "p.json");
  CHECK(h.at("dim").get<int>() == 32);
  CHECK(h.at("bc_rows").get<std::vector<int>>() == P.bc_rows);
  CHECK(std::filesystem::file_size(dir / "p.bin") == std::uintmax_t(2 * 32 * 32 * 16));
  std::ifstream bin(dir / "p.bin", std::ios::binary);
  std::vector<double> buf(2 * 32 * 32 * 2);
  bin.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size() * sizeof(double)));
  const int off = 2 * 32 * 32;
  CHECK(buf[2 * (5 * 32 + 7)] == P.M(5, 7).real());
  CHECK(buf[off + 2 * (8 * 32 + 3) + 1] == P.K(8, 3).imag());
  CHECK(buf[off + 2 * (17 * 32 + 20)] == P.K(17, 20).real());
  CHECK(buf[off + 2 * (17 * 32 + 20) + 1] == P.K(17, 20).imag());
  std::filesystem::remove_all(dir);
}
