#include "channelstab/steady.hpp"

#include <cmath>
#include <limits>

#include "channelstab/errors.hpp"

namespace cstab {

void PhysParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::Config, std::string("parameter ") + name + " must be positive and finite");
  };
  check(nu, "nu");
  check(kappa, "kappa");
  check(eps, "eps");
  check(alpha, "alpha");
  check(rho0, "rho0");
  check(C_U, "C_U");
}

RVec poiseuille(const PhysParams& params, const Grid& grid) {
  RVec U(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const double y = grid.nodes(j);
    U(j) = params.C_U * y * (1.0 - y);
  }
  return U;
}

RVec initial_guess(TargetGuess guess, const PhysParams& params, const Grid& grid) {
  switch (guess) {
    case TargetGuess::PlusOne: return RVec::Ones(grid.n);
    case TargetGuess::MinusOne: return -RVec::Ones(grid.n);
    case TargetGuess::Zero: return RVec::Zero(grid.n);
    case TargetGuess::Kink: break;
  }
  RVec phi(grid.n);
  const double s = std::sqrt(2.0 * params.eps);
  for (int j = 0; j < grid.n; ++j) phi(j) = std::tanh((grid.nodes(j) - 0.5) / s);
  return phi;
}

double upsilon(const RVec& phi, const PhysParams& params, const Grid& grid) {
  const RVec dphi = grid.D1 * phi;
  double s = 0.0;
  for (int j = 0; j < grid.n; ++j) {
    const double f = phi(j) * phi(j) - 1.0;
    s += grid.weights(j) * (0.5 * params.eps * dphi(j) * dphi(j) + params.alpha * 0.25 * f * f);
  }
  return s;
}

namespace {

RVec full_residual(const RVec& phi, const PhysParams& p, const Grid& g) {
  RVec r = -p.eps * (g.D2 * phi) + p.alpha * (phi.array().cube() - phi.array()).matrix();
  r(0) = g.D1.row(0).dot(phi);
  r(g.n - 1) = g.D1.row(g.n - 1).dot(phi);
  return r;
}

struct NewtonResult {
  RVec phi;
  bool converged = false;
  double residual = 0.0;
};

NewtonResult newton(const PhysParams& p, const Grid& g, RVec phi) {
  const int n = g.n;
  NewtonResult out;
  RVec r = full_residual(phi, p, g);
  for (int it = 0; it < 100; ++it) {
    if (r.lpNorm<Eigen::Infinity>() <= 1e-11) break;
    RMat J = -p.eps * g.D2;
    for (int j = 0; j < n; ++j) J(j, j) += p.alpha * (3.0 * phi(j) * phi(j) - 1.0);
    J.row(0) = g.D1.row(0);
    J.row(n - 1) = g.D1.row(n - 1);
    const RVec d = J.partialPivLu().solve(-r);
    if (!d.allFinite()) break;
    const double r0 = r.lpNorm<Eigen::Infinity>();
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-6) {
      const RVec trial = phi + t * d;
      const RVec rt = full_residual(trial, p, g);
      if (rt.lpNorm<Eigen::Infinity>() < (1.0 - 1e-4 * t) * r0) {
        phi = trial;
        r = rt;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    if ((t * d).lpNorm<Eigen::Infinity>() < 1e-14) break;
  }
  out.phi = phi;
  out.residual = std::max(target_residual(phi, p, g), std::max(std::abs(r(0)), std::abs(r(n - 1))));
  out.converged = out.residual <= 1e-9 && phi.allFinite();
  return out;
}

}  // namespace

double target_residual(const RVec& phi, const PhysParams& params, const Grid& grid) {
  const RVec r = -params.eps * (grid.D2 * phi) + params.alpha * (phi.array().cube() - phi.array()).matrix();
  return r.segment(1, grid.n - 2).lpNorm<Eigen::Infinity>();
}

RVec gradient_flow(const PhysParams& p, const Grid& g, const RVec& init, double tol, int max_steps) {
  const int n = g.n;
  const double dt = 0.05 / p.alpha;
  RMat A = RMat::Identity(n, n) - dt * p.eps * g.D2;
  A.row(0) = g.D1.row(0);
  A.row(n - 1) = g.D1.row(n - 1);
  const Eigen::PartialPivLU<RMat> lu(A);
  RVec phi = init;
  for (int step = 0; step < max_steps; ++step) {
    if (target_residual(phi, p, g) <= tol) break;
    RVec rhs = phi - dt * p.alpha * (phi.array().cube() - phi.array()).matrix();
    rhs(0) = 0.0;
    rhs(n - 1) = 0.0;
    phi = lu.solve(rhs);
  }
  return phi;
}

RVec solve_target_concentration(const PhysParams& params, const Grid& grid, const RVec& init) {
  if (init.size() != grid.n) throw Error(ErrorKind::InvalidArgument, "initial guess length does not match grid");
  NewtonResult candidates[2];
  candidates[0] = newton(params, grid, init);
  candidates[1] = newton(params, grid, gradient_flow(params, grid, init, 1e-7, 200000));
  int best = -1;
  double best_u = std::numeric_limits<double>::infinity();
  double last = std::numeric_limits<double>::infinity();
  for (int c = 0; c < 2; ++c) {
    last = std::min(last, candidates[c].residual);
    if (!candidates[c].converged) continue;
    const double u = upsilon(candidates[c].phi, params, grid);
    if (u < best_u) {
      best_u = u;
      best = c;
    }
  }
  if (best < 0) throw Error(ErrorKind::Convergence, "target concentration solve did not converge", last);
  return candidates[best].phi;
}

RVec antisymmetric_part(const RVec& phi_tg, const Grid& grid) {
  return 0.5 * (phi_tg - reflect(phi_tg, grid));
}

double gamma_coefficient(const RVec& phi_tg, const PhysParams& params, const Grid& grid) {
  double s = 0.0;
  for (int j = 0; j < grid.n; ++j) s += grid.weights(j) * (3.0 * phi_tg(j) * phi_tg(j) - 1.0);
  return params.rho0 * params.alpha * s;
}

bool check_H0(const RVec& phi_tg, const Grid& grid) {
  double s = 0.0;
  for (int j = 0; j < grid.n; ++j) s += grid.weights(j) * phi_tg(j) * phi_tg(j);
  return 3.0 * s - 1.0 >= -1e-12;
}

SteadyState build_steady(const PhysParams& params, const Grid& grid, TargetGuess guess) {
  params.validate();
  SteadyState s;
  s.params = params;
  s.U = poiseuille(params, grid);
  s.phi_tg = solve_target_concentration(params, grid, initial_guess(guess, params, grid));
  s.phi_inf = antisymmetric_part(s.phi_tg, grid);
  s.gamma = gamma_coefficient(s.phi_tg, params, grid);
  s.h0 = check_H0(s.phi_tg, grid);
  s.residual = target_residual(s.phi_tg, params, grid);
  s.upsilon = upsilon(s.phi_tg, params, grid);
  return s;
}

nlohmann::json to_json(const PhysParams& p) {
  return {{"nu", p.nu}, {"kappa", p.kappa}, {"eps", p.eps}, {"alpha", p.alpha}, {"rho0", p.rho0}, {"C_U", p.C_U}};
}

PhysParams params_from_json(const nlohmann::json& j, PhysParams p) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "params must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (!it->is_number()) throw Error(ErrorKind::Config, "parameter " + key + " must be a number");
    const double v = it->get<double>();
    if (key == "nu") p.nu = v;
    else if (key == "kappa") p.kappa = v;
    else if (key == "eps") p.eps = v;
    else if (key == "alpha") p.alpha = v;
    else if (key == "rho0") p.rho0 = v;
    else if (key == "C_U") p.C_U = v;
    else throw Error(ErrorKind::Config, "unknown parameter " + key);
  }
  return p;
}

namespace {
std::vector<double> to_std(const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
RVec from_std(const nlohmann::json& j, int n, const char* name) {
  const auto v = j.at(name).get<std::vector<double>>();
  if (int(v.size()) != n) throw Error(ErrorKind::Config, std::string("steady field ") + name + " has wrong length");
  return Eigen::Map<const RVec>(v.data(), n);
}
}  // namespace

nlohmann::json to_json(const SteadyState& s, const Grid& grid) {
  return {{"schema", "channelstab.steady/1"},
          {"n", grid.n},
          {"params", to_json(s.params)},
          {"gamma", s.gamma},
          {"h0", s.h0},
          {"residual", s.residual},
          {"upsilon", s.upsilon},
          {"nodes", to_std(grid.nodes)},
          {"U", to_std(s.U)},
          {"phi_tg", to_std(s.phi_tg)},
          {"phi_inf", to_std(s.phi_inf)}};
}

SteadyState steady_from_json(const nlohmann::json& j, const Grid& grid) {
  try {
    if (j.at("n").get<int>() != grid.n) throw Error(ErrorKind::Config, "cached steady state was computed on a different grid");
    SteadyState s;
    s.params = params_from_json(j.at("params"));
    s.gamma = j.at("gamma").get<double>();
    s.h0 = j.at("h0").get<bool>();
    s.residual = j.at("residual").get<double>();
    s.upsilon = j.at("upsilon").get<double>();
    s.U = from_std(j, grid.n, "U");
    s.phi_tg = from_std(j, grid.n, "phi_tg");
    s.phi_inf = from_std(j, grid.n, "phi_inf");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed steady state: ") + e.what());
  }
}

}  // namespace cstab
