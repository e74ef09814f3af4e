#include "doctest.h"

#include <cmath>

#include "channelstab/errors.hpp"
#include "channelstab/pipeline.hpp"
#include "fixtures.hpp"

using namespace cstab;

namespace {

struct Mode {
  const ModePencil* pencil;
  const EigenSet* eig;
  const GainSet* gains;
};

Mode controlled(ModeIndex m) {
  const ControlSet& cs = fixtures::controls64();
  const int i = cs.index(m);
  REQUIRE(i >= 0);
  return {&cs.pencils[i], &cs.eigs[i], cs.gains_for(m)};
}

CVec test_vector(int dim, int seed) {
  CVec x(dim);
  for (int i = 0; i < dim; ++i) x(i) = cd(std::sin(0.7 * i + seed), std::cos(1.3 * i * seed + 0.2));
  return x;
}

}  // namespace

TEST_CASE("gamma sequence") {
  CHECK(gammas_from_base(3, 10.0) == std::vector<double>{10.0, 20.0, 40.0});
  CHECK(gammas_from_base(1, 7.5) == std::vector<double>{7.5});
  EigenSet e;
  e.lambdas = CVec(2);
  e.lambdas << 0.5, -3.0;
  e.N_unstable = 1;
  CHECK(minimal_gamma_base(e) == 15.0);
  e.lambdas(0) = cd(3.0, 4.0);
  CHECK(minimal_gamma_base(e) == 60.0);
}

TEST_CASE("R matrices for a single unstable eigenvalue") {
  CVec c(1), lam(1);
  c << cd(2.0, 1.0);
  lam << 1.5;
  const RParts p = build_R_matrices(c, lam, {10.0});
  CHECK(std::abs(p.R(0, 0) - 5.0) <= 1e-15);
  CHECK(std::abs(p.R_i[0](0, 0) - 5.0 / (11.5 * 11.5)) <= 1e-15);
  CHECK(std::abs(p.R_big(0, 0) - 11.5 * 11.5 / 5.0) <= 1e-13);
  CHECK(std::abs(p.Lambda_sum(0, 0) - 1.0 / 11.5) <= 1e-15);
  CHECK(p.cond == 1.0);
  CHECK_THROWS_AS(build_R_matrices(CVec::Zero(1), lam, {10.0}), Error);
}

TEST_CASE("R matrices for two unstable eigenvalues") {
  CVec c(2), lam(2);
  c << cd(1.0, -0.5), cd(0.3, 2.0);
  lam << cd(4.0, 1.0), cd(4.0, -1.0);
  const RParts p = build_R_matrices(c, lam, {100.0, 200.0});
  CMat S = p.R_i[0] + p.R_i[1];
  CHECK((p.R_big * S - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((p.R - p.R.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p.R_i[1] - p.R_i[1].adjoint()).cwiseAbs().maxCoeff() <= 1e-18);
  CHECK(std::abs(p.R_i[0](0, 1) - std::conj(c(0)) * c(1) / ((100.0 + lam(0)) * std::conj(100.0 + lam(1)))) <= 1e-15);
  CHECK(std::abs(p.Lambda_sum(1, 1) - std::conj(1.0 / (100.0 + lam(1)) + 1.0 / (200.0 + lam(1)))) <= 1e-15);
  CHECK(p.Lambda_sum(0, 1) == 0.0);
}

TEST_CASE("boundary values from the feedback functional") {
  ActuatorChoice ch;
  ch.a = cd(1.0, 1.0);
  ch.b = cd(2.0, 0.0);
  auto [s, t] = boundary_values(cd(0.0, 3.0), {2, 1}, ch);
  CHECK(std::abs(s - 1.5) <= 1e-15);
  CHECK(std::abs(t - cd(-1.5, 1.5)) <= 1e-15);
  auto [s0, t0] = boundary_values(cd(1.0, 0.0), {1, 0}, ch);
  CHECK(std::abs(s0 - cd(0.0, -1.0)) <= 1e-15);
  CHECK(std::abs(t0 - cd(0.0, 2.0)) <= 1e-15);
  CHECK_THROWS_AS(boundary_values(1.0, {0, 1}, ch), Error);
}

TEST_CASE("feedback functional") {
  const Grid& g = fixtures::grid64();
  for (ModeIndex m : {ModeIndex{1, 1}, ModeIndex{2, 0}}) {
    const Mode md = controlled(m);
    REQUIRE(md.gains != nullptr);
    const GainSet& G = *md.gains;
    const int dim = md.pencil->dim;
    CHECK(omega(CVec::Zero(dim), G, *md.eig, *md.pencil, g) == 0.0);
    const cd at_eig = omega(md.eig->right.col(0), G, *md.eig, *md.pencil, g);
    const cd expected = (G.c_vec.transpose() * G.Lambda_sum * G.R_big).transpose()(0);
    CHECK(std::abs(at_eig - expected) <= 1e-9 * std::abs(expected));
    const CVec x = test_vector(dim, 1), y = test_vector(dim, 2);
    const cd a(0.3, -1.2);
    const cd lin = omega(x + a * y, G, *md.eig, *md.pencil, g);
    const cd sep = omega(x, G, *md.eig, *md.pencil, g) + a * omega(y, G, *md.eig, *md.pencil, g);
    CHECK(std::abs(lin - sep) <= 1e-12 * (std::abs(lin) + std::abs(sep)));
    CHECK(std::abs(omega_row(x, G) - omega(x, G, *md.eig, *md.pencil, g)) <= 1e-12 * std::abs(omega_row(x, G)));
  }
}

TEST_CASE("lifting solves") {
  const Grid& g = fixtures::grid64();
  const Mode md = controlled({1, 1});
  const GainSet& G = *md.gains;
  const double gamma = G.gammas[0];
  const cd psi(0.4, -0.9);
  CHECK(lifting_solve(gamma, 0.0, *md.pencil, *md.eig, g, G.actuator).cwiseAbs().maxCoeff() == 0.0);
  const CVec x1 = lifting_solve(gamma, psi, *md.pencil, *md.eig, g, G.actuator);
  const CVec x2 = lifting_solve(gamma, 2.0 * psi, *md.pencil, *md.eig, g, G.actuator);
  CHECK((x2 - 2.0 * x1).cwiseAbs().maxCoeff() <= 1e-12 * x1.cwiseAbs().maxCoeff());
  const int n = g.n;
  const CVec v = x1.head(n);
  CHECK(std::abs(v(0)) <= 1e-12);
  CHECK(std::abs(v(n - 1)) <= 1e-12);
  CHECK(std::abs(g.D1.row(0).cast<cd>().dot(v) + psi) <= 1e-10);
  CHECK(std::abs(g.D1.row(n - 1).cast<cd>().dot(v) - std::conj(G.actuator) * psi) <= 1e-10);
  CHECK(lifting_residual(G, *md.eig, *md.pencil, g) <= 1e-6);
  for (double r : G.sigma_ratio) CHECK(r > 1e-10);
}

TEST_CASE("closed loop is exponentially stable on the actuated modes") {
  const ControlSet& cs = fixtures::controls64();
  for (std::size_t i = 0; i < cs.pencils.size(); ++i) {
    const GainSet* G = cs.gains_for(cs.pencils[i].mode);
    const ModePencil P = G ? closed_loop_pencil(cs.pencils[i], *G) : cs.pencils[i];
    CHECK(spectral_abscissa(pencil_eigenvalues(P)) <= -0.1);
    if (G && !G->empty()) {
      CHECK(G->reduced_abscissa < 0.0);
      CHECK(G->lifting_residual <= 1e-6);
      CHECK(spectral_abscissa(reduced_matrix(*G).eigenvalues()) == G->reduced_abscissa);
    }
  }
}

TEST_CASE("gain construction order and conventions") {
  const Mode md = controlled({1, 1});
  const GainSet& G = *md.gains;
  REQUIRE(G.gammas.size() == 1);
  CHECK(G.gammas[0] >= minimal_gamma_base(*md.eig));
  CHECK(G.l_vec(0) == md.eig->traces[0].first + G.actuator * md.eig->traces[0].second);
  CHECK(G.c_vec(0) == md.pencil->nu * G.l_vec(0));
  CHECK(G.actuator == fixtures::controls64().actuator.a);
  CHECK(controlled({2, 0}).gains->actuator == fixtures::controls64().actuator.b);
}

TEST_CASE("forced actuator coefficient with vanishing margin is rejected") {
  const ControlSet& cs = fixtures::controls64();
  const EigenSet& e = *cs.eig_for({1, 1});
  REQUIRE(!e.traces.empty());
  const cd bad = -e.traces[0].first / e.traces[0].second;
  try {
    choose_actuators(cs.eigs, bad);
    FAIL("expected a rejection");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::LemmaViolation);
  }
  CHECK_NOTHROW(choose_actuators(cs.eigs, cd(0.0, 0.0)));
  CHECK(choose_actuators(cs.eigs).margin() >= cs.actuator.margin() - 1e-15);
}

TEST_CASE("gains JSON round trip") {
  const GainSet& G = *controlled({1, 1}).gains;
  const GainSet r = gains_from_json(to_json(G));
  CHECK(r.mode == G.mode);
  CHECK(r.actuator == G.actuator);
  CHECK(r.gammas == G.gammas);
  CHECK((r.row_functional - G.row_functional).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.R_big - G.R_big).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.c_vec - G.c_vec).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.Lambda_sum - G.Lambda_sum).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(r.R_i.size() == G.R_i.size());
  CHECK((r.R_i[0] - G.R_i[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((reduced_matrix(r) - reduced_matrix(G)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.lifting_residual == G.lifting_residual);
  const CVec x = test_vector(int(G.row_functional.size()), 3);
  CHECK(omega_row(x, r) == omega_row(x, G));
}

TEST_CASE("conjugate mode gains give the conjugate closed loop") {
  const Grid& g = fixtures::grid64();
  const Mode md = controlled({1, 1});
  const ModePencil Pc = assemble_pencil({-1, -1}, g, fixtures::steady64());
  const CVec a = pencil_eigenvalues(closed_loop_pencil(*md.pencil, *md.gains));
  const CVec b = pencil_eigenvalues(closed_loop_pencil(Pc, conjugate_gains(*md.gains)));
  REQUIRE(a.size() == b.size());
  for (int j = 0; j < 8; ++j) CHECK(std::abs(a(j).real() - b(j).real()) <= 1e-9 * std::abs(a(j)));
  CHECK(std::abs(spectral_abscissa(a) - spectral_abscissa(b)) <= 1e-9 * std::abs(spectral_abscissa(a)));
}
