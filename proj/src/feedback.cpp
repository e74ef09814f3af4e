#include "channelstab/feedback.hpp"

#include <cmath>

#include "channelstab/errors.hpp"
#include "channelstab/io.hpp"

namespace cstab {

namespace {

std::string mode_str(ModeIndex m) { return "(" + std::to_string(m.k) + "," + std::to_string(m.l) + ")"; }

// Row vector f with f x = <(L v, phi), z>_W.
CVec pairing_row(const ModePencil& pencil, const Grid& grid, const CVec& z) {
  CVec wz(z.size());
  for (int i = 0; i < z.size(); ++i) wz(i) = grid.weights(i % grid.n) * std::conj(z(i));
  return pencil.M.transpose() * wz;
}

CVec wall_rhs(cd psi, cd a, const ModePencil& pencil, int extra) {
  const BcRows b = bc_rows(pencil.n);
  CVec rhs = CVec::Zero(pencil.dim + extra);
  rhs(b.dv0) = -psi;
  rhs(b.dv1) = std::conj(a) * psi;
  return rhs;
}

nlohmann::json cmat_json(const CMat& A) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < A.rows(); ++i) a.push_back(complex_json(CVec(A.row(i).transpose())));
  return a;
}

CMat cmat_from_json(const nlohmann::json& j, int N) {
  if (!j.is_array() || int(j.size()) != N) throw Error(ErrorKind::Config, "gains matrix has the wrong shape");
  CMat A(N, N);
  for (int i = 0; i < N; ++i) {
    const CVec r = cvec_from_json(j[i]);
    if (r.size() != N) throw Error(ErrorKind::Config, "gains matrix has the wrong shape");
    A.row(i) = r.transpose();
  }
  return A;
}

}  // namespace

std::vector<double> gammas_from_base(int N, double base) {
  std::vector<double> g(N);
  for (int i = 0; i < N; ++i) g[i] = base * std::ldexp(1.0, i);
  return g;
}

double minimal_gamma_base(const EigenSet& eig) {
  double m = 0.0;
  for (int j = 0; j < eig.N_unstable; ++j) m = std::max(m, std::abs(eig.lambdas(j)));
  return 10.0 * (1.0 + m);
}

CMat lifting_matrix(double gamma, const ModePencil& pencil, const EigenSet& eig, const Grid& grid) {
  const int D = pencil.dim, N = eig.N_unstable;
  CMat G = CMat::Zero(D + N, D + N);
  G.topLeftCorner(D, D) = pencil.K + gamma * pencil.M;
  for (int j = 0; j < N; ++j) {
    G.block(0, D + j, D, 1) = 2.0 * eig.lambdas(j) * (pencil.M * eig.right.col(j));
    G.block(D + j, 0, 1, D) = -pairing_row(pencil, grid, eig.left.col(j)).transpose();
    G(D + j, D + j) = 1.0;
  }
  return G;
}

double lifting_sigma_ratio(double gamma, const ModePencil& pencil, const EigenSet& eig, const Grid& grid) {
  CMat G = lifting_matrix(gamma, pencil, eig, grid);
  for (int i = 0; i < G.rows(); ++i) {
    const double s = G.row(i).cwiseAbs().maxCoeff();
    if (s > 0.0) G.row(i) /= s;
  }
  const RVec sv = Eigen::BDCSVD<CMat>(G).singularValues();
  return sv(sv.size() - 1) / sv(0);
}

std::vector<double> choose_gamma_sequence(const EigenSet& eig, const ModePencil& pencil, const Grid& grid,
                                          double base, std::vector<double>* ratios) {
  const int N = eig.N_unstable;
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "gamma sequence requested for a mode without unstable eigenvalues");
  base = std::max(base, minimal_gamma_base(eig));
  for (int attempt = 0; attempt <= 8; ++attempt, base *= 2.0) {
    const auto g = gammas_from_base(N, base);
    std::vector<double> r;
    bool ok = true;
    for (double gi : g) {
      r.push_back(lifting_sigma_ratio(gi, pencil, eig, grid));
      if (!(r.back() > 1e-10)) ok = false;
    }
    if (ok) {
      if (ratios) *ratios = r;
      return g;
    }
  }
  throw Error(ErrorKind::GammaSelection, "lifting problem not certified on mode " + mode_str(eig.mode));
}

RParts build_R_matrices(const CVec& c, const CVec& lambdas, const std::vector<double>& gammas) {
  const int N = int(c.size());
  if (lambdas.size() != N || int(gammas.size()) != N)
    throw Error(ErrorKind::InvalidArgument, "build_R_matrices: size mismatch");
  for (int j = 0; j < N; ++j)
    if (c(j) == 0.0) throw Error(ErrorKind::InvalidArgument, "build_R_matrices: zero wall weight");
  RParts p;
  p.R = c.conjugate() * c.transpose();
  CMat S = CMat::Zero(N, N);
  p.Lambda_sum = CMat::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    CMat Li = CMat::Zero(N, N);
    for (int j = 0; j < N; ++j) Li(j, j) = 1.0 / (gammas[i] + lambdas(j));
    p.R_i.push_back(Li * p.R * Li.conjugate());
    p.Lambdas.push_back(Li);
    S += p.R_i.back();
    p.Lambda_sum += Li;
  }
  p.Lambda_sum = p.Lambda_sum.conjugate().eval();
  const RVec sv = Eigen::JacobiSVD<CMat>(S).singularValues();
  p.cond = sv(0) / sv(N - 1);
  if (!(sv(N - 1) > 0.0) || !(p.cond <= 1e12))
    throw Error(ErrorKind::Invertibility, "sum of R_i is singular or ill conditioned", p.cond);
  p.R_big = S.inverse();
  return p;
}

CVec lifting_solve(double gamma, cd psi, const ModePencil& pencil, const EigenSet& eig, const Grid& grid, cd a) {
  CMat G = lifting_matrix(gamma, pencil, eig, grid);
  CVec rhs = wall_rhs(psi, a, pencil, eig.N_unstable);
  for (int i = 0; i < G.rows(); ++i) {
    const double s = G.row(i).cwiseAbs().maxCoeff();
    if (s > 0.0) {
      G.row(i) /= s;
      rhs(i) /= s;
    }
  }
  const Eigen::PartialPivLU<CMat> lu(G);
  if (!(std::abs(lu.determinant()) > 0.0))
    throw Error(ErrorKind::WellPosedness, "lifting system singular on mode " + mode_str(pencil.mode));
  CVec sol = lu.solve(rhs);
  sol += lu.solve(rhs - G * sol);
  if (!sol.allFinite()) throw Error(ErrorKind::WellPosedness, "lifting solve produced non-finite values");
  return sol.head(pencil.dim);
}

CVec projections(const CVec& state, const EigenSet& eig, const ModePencil& pencil, const Grid& grid) {
  CVec z(eig.N_unstable);
  for (int j = 0; j < eig.N_unstable; ++j) z(j) = pairing(pencil, grid, state, eig.left.col(j));
  return z;
}

GainSet build_gains(const EigenSet& eig, const ModePencil& pencil, const Grid& grid, cd actuator, double base) {
  GainSet g;
  g.mode = eig.mode;
  g.actuator = actuator;
  const int N = eig.N_unstable;
  if (N == 0) return g;
  if (eig.mode.k == 0) throw Error(ErrorKind::InvalidArgument, "k = 0 modes carry no actuation");
  g.lambdas = eig.lambdas.head(N);
  g.l_vec.resize(N);
  for (int j = 0; j < N; ++j) g.l_vec(j) = eig.traces[j].first + actuator * eig.traces[j].second;
  g.c_vec = pencil.nu * g.l_vec;
  g.gammas = choose_gamma_sequence(eig, pencil, grid, base, &g.sigma_ratio);
  RParts p = build_R_matrices(g.c_vec, g.lambdas, g.gammas);
  g.Lambda_sum = p.Lambda_sum;
  g.R_i = std::move(p.R_i);
  g.R_big = p.R_big;
  g.cond_R = p.cond;
  // Omega = gv^T Z with gv^T = c^T Lambda_sum Rbig
  const CVec gv = (g.c_vec.transpose() * g.Lambda_sum * g.R_big).transpose();
  g.row_functional = CVec::Zero(pencil.dim);
  for (int j = 0; j < N; ++j) g.row_functional += gv(j) * pairing_row(pencil, grid, eig.left.col(j));
  const CVec ev = reduced_matrix(g).eigenvalues();
  g.reduced_abscissa = spectral_abscissa(ev);
  g.lifting_residual = lifting_residual(g, eig, pencil, grid);
  return g;
}

cd omega(const CVec& state, const GainSet& gains, const EigenSet& eig, const ModePencil& pencil, const Grid& grid) {
  if (!(eig.mode == gains.mode) || !(pencil.mode == gains.mode) || state.size() != pencil.dim)
    throw Error(ErrorKind::InvalidArgument, "omega: state, gains and eigenset belong to different modes");
  if (gains.empty()) return 0.0;
  const CVec Z = projections(state, eig, pencil, grid);
  return (gains.c_vec.transpose() * gains.Lambda_sum * gains.R_big * Z)(0);
}

cd omega_row(const CVec& state, const GainSet& gains) {
  if (gains.empty()) return 0.0;
  return (gains.row_functional.transpose() * state)(0);
}

std::pair<cd, cd> boundary_values(cd omega, ModeIndex mode, const ActuatorChoice& choice) {
  if (mode.k == 0) throw Error(ErrorKind::InvalidArgument, "boundary_values: k must be nonzero");
  const cd f = I_ / double(mode.k);
  return {-f * omega, std::conj(choice.for_mode(mode)) * f * omega};
}

CMat reduced_matrix(const GainSet& g) {
  const int N = int(g.gammas.size());
  CMat A = -g.gammas[0] * CMat::Identity(N, N);
  for (int i = 1; i < N; ++i) A += (g.gammas[0] - g.gammas[i]) * g.R_i[i] * g.R_big;
  return A;
}

double lifting_residual(const GainSet& g, const EigenSet& eig, const ModePencil& pencil, const Grid& grid, cd psi) {
  double worst = 0.0;
  for (double gamma : g.gammas) {
    const CVec x = lifting_solve(gamma, psi, pencil, eig, grid, g.actuator);
    for (int j = 0; j < eig.N_unstable; ++j) {
      const cd lhs = pairing(pencil, grid, x, eig.left.col(j));
      const cd rhs = -psi * pencil.nu * std::conj(g.l_vec(j)) / (eig.lambdas(j) + gamma);
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
  }
  return worst;
}

ModePencil closed_loop_pencil(const ModePencil& pencil, const GainSet& gains) {
  ModePencil P = pencil;
  if (gains.empty()) return P;
  const cd f = I_ / double(pencil.mode.k);
  const cd s_coef = -f, t_coef = std::conj(gains.actuator) * f;
  for (int r : pencil.bc_rows) {
    const cd c = pencil.input_s(r) * s_coef + pencil.input_t(r) * t_coef;
    if (c != 0.0) P.K.row(r) -= c * gains.row_functional.transpose();
  }
  return P;
}

nlohmann::json to_json(const GainSet& g) {
  return {{"schema", "channelstab.gains/1"},
          {"mode", {g.mode.k, g.mode.l}},
          {"actuator", complex_json(g.actuator)},
          {"margin", g.margin},
          {"N", g.gammas.size()},
          {"gammas", g.gammas},
          {"lifting_sigma_ratio", g.sigma_ratio},
          {"lambdas", complex_json(g.lambdas)},
          {"l_vec", complex_json(g.l_vec)},
          {"c_vec", complex_json(g.c_vec)},
          {"cond_R", g.cond_R},
          {"reduced_abscissa", g.reduced_abscissa},
          {"lifting_residual", g.lifting_residual},
          {"Lambda_sum", cmat_json(g.Lambda_sum)},
          {"R_i", [&] {
             nlohmann::json a = nlohmann::json::array();
             for (const auto& r : g.R_i) a.push_back(cmat_json(r));
             return a;
           }()},
          {"R_big", cmat_json(g.R_big)},
          {"row_functional", complex_json(g.row_functional)}};
}

GainSet gains_from_json(const nlohmann::json& j) {
  try {
    GainSet g;
    g.mode = {j.at("mode")[0].get<int>(), j.at("mode")[1].get<int>()};
    g.actuator = complex_from_json(j.at("actuator"));
    g.margin = j.at("margin").get<double>();
    g.gammas = j.at("gammas").get<std::vector<double>>();
    g.sigma_ratio = j.at("lifting_sigma_ratio").get<std::vector<double>>();
    g.lambdas = cvec_from_json(j.at("lambdas"));
    g.l_vec = cvec_from_json(j.at("l_vec"));
    g.c_vec = cvec_from_json(j.at("c_vec"));
    g.cond_R = j.at("cond_R").get<double>();
    g.reduced_abscissa = j.at("reduced_abscissa").get<double>();
    g.lifting_residual = j.at("lifting_residual").get<double>();
    g.row_functional = cvec_from_json(j.at("row_functional"));
    const int N = int(g.gammas.size());
    if (g.lambdas.size() != N || g.l_vec.size() != N || g.c_vec.size() != N)
      throw Error(ErrorKind::Config, "gains file vectors do not match the gamma count");
    g.Lambda_sum = cmat_from_json(j.at("Lambda_sum"), N);
    g.R_big = cmat_from_json(j.at("R_big"), N);
    const auto& ri = j.at("R_i");
    if (!ri.is_array() || int(ri.size()) != N) throw Error(ErrorKind::Config, "gains file R_i has the wrong length");
    for (const auto& r : ri) g.R_i.push_back(cmat_from_json(r, N));
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed gains file: ") + e.what());
  }
}

}  // namespace cstab
