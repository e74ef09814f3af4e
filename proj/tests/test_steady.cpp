#include "doctest.h"

#include <cmath>

#include "channelstab/errors.hpp"
#include "channelstab/steady.hpp"
#include "fixtures.hpp"

using namespace cstab;

namespace {

// Barycentric interpolation through the Chebyshev-Lobatto samples.
double interpolate(const Grid& g, const RVec& f, double y) {
  double num = 0.0, den = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double d = y - g.nodes(j);
    if (d == 0.0) return f(j);
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == g.n - 1) w *= 0.5;
    num += w * f(j) / d;
    den += w / d;
  }
  return num / den;
}

RVec kink_init(const Grid& g, double eps) {
  RVec v(g.n);
  for (int i = 0; i < g.n; ++i) v(i) = std::tanh((g.nodes(i) - 0.5) / std::sqrt(2.0 * eps));
  return v;
}

}  // namespace

TEST_CASE("Poiseuille profile") {
  const Grid g = build_grid(32);
  PhysParams p;
  p.C_U = 1.0;
  const RVec U = poiseuille(p, g);
  CHECK(U(0) == 0.0);
  CHECK(U(g.n - 1) == 0.0);
  CHECK(std::abs(interpolate(g, U, 0.5) - 0.25) <= 1e-12);
  p.C_U = 4.0;
  CHECK(std::abs(interpolate(g, poiseuille(p, g), 0.5) - 1.0) <= 1e-12);
  CHECK(poiseuille(p, g).maxCoeff() <= 1.0);
}

TEST_CASE("constant initial guesses are exact targets") {
  const Grid g = build_grid(32);
  const PhysParams p;
  const RVec plus = solve_target_concentration(p, g, RVec::Ones(g.n));
  CHECK((plus.array() - 1.0).abs().maxCoeff() <= 1e-14);
  CHECK(target_residual(plus, p, g) <= 1e-12);
  const RVec minus = solve_target_concentration(p, g, -RVec::Ones(g.n));
  CHECK((minus.array() + 1.0).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("kink target matches the gradient flow stationary state") {
  const Grid& g = fixtures::grid64();
  const PhysParams p;
  const RVec init = kink_init(g, p.eps);
  const RVec phi = solve_target_concentration(p, g, init);
  CHECK(target_residual(phi, p, g) <= 1e-9);
  CHECK(std::abs(g.D1.row(0).dot(phi)) <= 1e-10);
  CHECK(std::abs(g.D1.row(g.n - 1).dot(phi)) <= 1e-10);
  CHECK(phi.maxCoeff() - phi.minCoeff() > 1.0);
  CHECK(upsilon(phi, p, g) < upsilon(RVec::Zero(g.n), p, g));
  const RVec flow = gradient_flow(p, g, init, 1e-10, 200000);
  CHECK((phi - flow).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("antisymmetric part") {
  const Grid g = build_grid(32);
  const RVec y = g.nodes;
  CHECK((antisymmetric_part(y, g).array() - (y.array() - 0.5)).abs().maxCoeff() <= 1e-15);
  const RVec sym = (y.array() * (1.0 - y.array())).matrix();
  CHECK(antisymmetric_part(sym, g).cwiseAbs().maxCoeff() <= 1e-15);
  const RVec anti = antisymmetric_part(y, g);
  CHECK((antisymmetric_part(anti, g) - anti).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("gamma coefficient and the H0 condition") {
  const Grid g = build_grid(32);
  const PhysParams p;
  CHECK(std::abs(gamma_coefficient(RVec::Ones(g.n), p, g) - 2.0) <= 1e-14);
  CHECK(std::abs(gamma_coefficient(RVec::Zero(g.n), p, g) + 1.0) <= 1e-14);
  CHECK(check_H0(RVec::Ones(g.n), g));
  CHECK(check_H0(-RVec::Ones(g.n), g));
  CHECK_FALSE(check_H0(RVec::Zero(g.n), g));
  RVec step(g.n);
  for (int i = 0; i < g.n; ++i) step(i) = g.nodes(i) < 0.5 ? -1.0 : 1.0;
  CHECK(check_H0(step, g));
}

TEST_CASE("gamma of the kink agrees with a fine trapezoid rule") {
  const Grid& g = fixtures::grid64();
  const SteadyState& s = fixtures::steady64();
  const int m = 1000000;
  double sum = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double phi = interpolate(g, s.phi_tg, double(i) / m);
    const double f = 3.0 * phi * phi - 1.0;
    sum += (i == 0 || i == m) ? 0.5 * f : f;
  }
  const double oracle = s.params.rho0 * s.params.alpha * sum / m;
  CHECK(s.gamma >= 0.0);
  CHECK(s.h0);
  CHECK(std::abs(s.gamma - oracle) <= 1e-6 * std::abs(oracle));
}

TEST_CASE("steady state for a constant target") {
  const Grid g = build_grid(32);
  const SteadyState s = build_steady(PhysParams{}, g, TargetGuess::PlusOne);
  CHECK(std::abs(s.gamma - 2.0 * s.params.rho0 * s.params.alpha) <= 1e-14);
  CHECK(s.h0);
}

TEST_CASE("steady state JSON round trip") {
  const Grid& g = fixtures::grid64();
  const SteadyState& s = fixtures::steady64();
  const SteadyState r = steady_from_json(to_json(s, g), g);
  CHECK(r.U == s.U);
  CHECK(r.phi_tg == s.phi_tg);
  CHECK(r.phi_inf == s.phi_inf);
  CHECK(r.gamma == s.gamma);
  CHECK(to_json(r.params) == to_json(s.params));
  CHECK_THROWS_AS(steady_from_json(to_json(s, g), build_grid(32)), Error);
}

TEST_CASE("parameter validation") {
  PhysParams p;
  CHECK_NOTHROW(p.validate());
  p.eps = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = PhysParams{};
  p.nu = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
}
