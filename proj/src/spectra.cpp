#include "channelstab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "channelstab/errors.hpp"
#include "channelstab/io.hpp"
#include "channelstab/parallel.hpp"
#include "ggev.hpp"

namespace cstab {

namespace {

std::string mode_str(ModeIndex m) { return "(" + std::to_string(m.k) + "," + std::to_string(m.l) + ")"; }

std::vector<int> finite_sorted(const detail::GgevResult& r, double cut, CVec& lambdas) {
  std::vector<int> idx;
  std::vector<cd> lam(r.alpha.size());
  for (int i = 0; i < r.alpha.size(); ++i) {
    if (r.beta(i) == 0.0) continue;
    lam[i] = r.alpha(i) / r.beta(i);
    if (!std::isfinite(lam[i].real()) || !std::isfinite(lam[i].imag()) || std::abs(lam[i]) > cut) continue;
    idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (lam[a].real() != lam[b].real()) return lam[a].real() > lam[b].real();
    return lam[a].imag() < lam[b].imag();
  });
  lambdas.resize(Eigen::Index(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) lambdas(Eigen::Index(i)) = lam[idx[i]];
  return idx;
}

double weight(const Grid& g, int row) { return g.weights(row % g.n); }

}  // namespace

CVec pencil_eigenvalues(const ModePencil& pencil, double infinite_cut) {
  const auto r = detail::ggev(-pencil.K, pencil.M, false, false);
  CVec lam;
  finite_sorted(r, infinite_cut, lam);
  return lam;
}

double spectral_abscissa(const CVec& lambdas) {
  double a = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < lambdas.size(); ++i) a = std::max(a, lambdas(i).real());
  return a;
}

cd pairing(const ModePencil& pencil, const Grid& grid, const CVec& x, const CVec& z) {
  const CVec Mx = pencil.M * x;
  cd s = 0.0;
  for (int i = 0; i < Mx.size(); ++i) s += weight(grid, i) * Mx(i) * std::conj(z(i));
  return s;
}

CMat pairing_matrix(const ModePencil& pencil, const Grid& grid, const CMat& X, const CMat& Z) {
  CMat P(X.cols(), Z.cols());
  for (int i = 0; i < X.cols(); ++i)
    for (int j = 0; j < Z.cols(); ++j) P(i, j) = pairing(pencil, grid, X.col(i), Z.col(j));
  return P;
}

double backward_error(const ModePencil& pencil, cd lambda, const CVec& x) {
  const double r = (lambda * (pencil.M * x) + pencil.K * x).norm();
  return r / ((std::abs(lambda) * pencil.M.norm() + pencil.K.norm()) * x.norm());
}

EigenSet biorthonormalize(EigenSet eig, const ModePencil& pencil, const Grid& grid) {
  const int N = eig.N_unstable;
  if (N == 0) return eig;
  const CMat P = pairing_matrix(pencil, grid, eig.right.leftCols(N), eig.left.leftCols(N));
  Eigen::JacobiSVD<CMat> svd(P);
  const double smax = svd.singularValues()(0), smin = svd.singularValues()(N - 1);
  if (!(smin > 1e-12 * smax))
    throw Error(ErrorKind::Defective, "singular pairing block on mode " + mode_str(eig.mode), smax / smin);
  eig.pairing_condition = smax / smin;
  eig.near_defective = eig.pairing_condition > 1e8;
  const CMat C = P.inverse();
  eig.right.leftCols(N) = (eig.right.leftCols(N) * C.transpose()).eval();
  return eig;
}

std::vector<std::pair<cd, cd>> boundary_traces(const EigenSet& eig, const ModePencil& pencil, const Grid& grid) {
  std::vector<std::pair<cd, cd>> t;
  if (pencil.dim != 2 * grid.n) return t;
  const BcRows b = bc_rows(grid.n);
  for (int j = 0; j < eig.N_unstable; ++j) {
    const cd y0 = weight(grid, b.dv0) * eig.left(b.dv0, j);
    const cd y1 = weight(grid, b.dv1) * eig.left(b.dv1, j);
    t.emplace_back(y0 / pencil.nu, -y1 / pencil.nu);
  }
  return t;
}

std::pair<cd, cd> second_derivative_traces(const CVec& f, const Grid& grid) {
  if (f.size() < grid.n) throw Error(ErrorKind::InvalidArgument, "second_derivative_traces: vector too short");
  const CVec v = f.head(grid.n);
  return {grid.D2.row(0).cast<cd>().dot(v), grid.D2.row(grid.n - 1).cast<cd>().dot(v)};
}

EigenSet solve_pencil_eigen(const ModePencil& pencil, const Grid& grid, const EigenOptions& opt) {
  EigenSet e;
  e.mode = pencil.mode;
  e.n = grid.n;
  detail::GgevResult r;
  try {
    r = detail::ggev(-pencil.K, pencil.M, opt.vectors, opt.vectors);
  } catch (const Error& err) {
    throw Error(ErrorKind::Numeric, std::string(err.what()) + " on mode " + mode_str(pencil.mode));
  }
  const std::vector<int> idx = finite_sorted(r, opt.infinite_cut, e.lambdas);
  for (int i = 0; i < e.lambdas.size(); ++i)
    if (e.lambdas(i).real() >= -opt.margin_unstable) ++e.N_unstable;
  if (!opt.vectors) return e;

  const int dim = pencil.dim, m = int(idx.size());
  std::vector<char> is_bc(dim, 0);
  for (int rrow : pencil.bc_rows) is_bc[rrow] = 1;
  e.right.resize(dim, m);
  e.left.resize(dim, m);
  for (int c = 0; c < m; ++c) {
    CVec x = r.VR.col(idx[c]);
    x /= std::sqrt(std::max(0.0, inner_stacked(x, x, grid).real()));
    CVec z = r.VL.col(idx[c]);
    double nz = 0.0;
    for (int i = 0; i < dim; ++i) {
      z(i) /= weight(grid, i);
      if (!is_bc[i]) nz += weight(grid, i) * std::norm(z(i));
    }
    z /= std::sqrt(nz);
    e.right.col(c) = x;
    e.left.col(c) = z;
    e.max_backward_error = std::max(e.max_backward_error, backward_error(pencil, e.lambdas(c), x));
  }
  e = biorthonormalize(std::move(e), pencil, grid);
  e.traces = boundary_traces(e, pencil, grid);
  return e;
}

std::vector<cd> actuator_candidates() {
  std::vector<cd> c;
  for (double m : {1.0, 0.5, 2.0})
    for (int k = 0; k < 360; ++k) c.push_back(std::polar(m, 2.0 * std::numbers::pi * k / 360.0));
  return c;
}

double coefficient_margin(const std::vector<TraceRecord>& traces, cd a) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : traces) m = std::min(m, std::abs(t.t0 + a * t.t1) / (std::abs(t.t0) + std::abs(t.t1)));
  return traces.empty() ? 1.0 : m;
}

CoefficientChoice select_actuator_coefficient(const std::vector<TraceRecord>& traces, double threshold) {
  for (const auto& t : traces)
    if (!(std::abs(t.t0) + std::abs(t.t1) > threshold))
      throw Error(ErrorKind::LemmaViolation, "dual eigenvector " + std::to_string(t.j) + " of mode " + mode_str(t.mode) +
                                                 " has vanishing wall traces");
  CoefficientChoice best{cd(1.0, 0.0), -1.0};
  for (cd a : actuator_candidates()) {
    const double m = coefficient_margin(traces, a);
    if (m > best.margin) best = {a, m};
  }
  return best;
}

ModePencil mode_pencil(ModeIndex mode, const Grid& grid, const SteadyState& steady) {
  if (mode.k != 0) return assemble_pencil(mode, grid, steady);
  if (mode.l != 0) return assemble_k0_pencil(mode.l, grid, steady);
  return assemble_phi00_pencil(grid, steady);
}

std::vector<ModeIndex> scan_modes(int limit) {
  std::vector<ModeIndex> modes;
  for (int k = 0; k <= limit; ++k)
    for (int l = -limit; l <= limit; ++l) {
      if (k == 0 && l <= 0) continue;
      if (k * k + l * l > limit * limit) continue;
      modes.push_back({k, l});
    }
  return modes;
}

std::vector<ModeScan> scan_spectra(const SteadyState& steady, const Grid& grid, int scan_limit, int threads,
                                   double margin_unstable) {
  const auto modes = scan_modes(scan_limit);
  std::vector<ModeScan> out(modes.size());
  parallel_for(int(modes.size()), threads, [&](int i) {
    const CVec lam = pencil_eigenvalues(mode_pencil(modes[i], grid, steady));
    ModeScan s;
    s.mode = modes[i];
    s.abscissa = spectral_abscissa(lam);
    for (int j = 0; j < lam.size(); ++j)
      if (lam(j).real() >= -margin_unstable) ++s.N_unstable;
    out[i] = s;
  });
  return out;
}

int cutoff_from_scan(const std::vector<ModeScan>& scan, double eta, int scan_limit, double* worst_beyond) {
  double bad_r = 0.0, worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : scan) {
    worst = std::max(worst, s.abscissa);
    if (s.abscissa > -eta || s.N_unstable > 0) bad_r = std::max(bad_r, s.mode.radius());
  }
  const int M = std::max(1, int(std::ceil(bad_r - 1e-12)));
  if (M >= scan_limit)
    throw Error(ErrorKind::ScanExhausted,
                "no cutoff below scan limit " + std::to_string(scan_limit) + "; worst abscissa " + fmt(worst), worst);
  double wb = -std::numeric_limits<double>::infinity();
  for (const auto& s : scan)
    if (s.mode.radius() > M) wb = std::max(wb, s.abscissa);
  if (worst_beyond) *worst_beyond = wb;
  return M;
}

CutoffResult determine_cutoff(const SteadyState& steady, const Grid& grid, double eta, int scan_limit, int threads) {
  if (!(eta > 0.0)) throw Error(ErrorKind::InvalidArgument, "eta must be positive");
  if (scan_limit < 4) throw Error(ErrorKind::InvalidArgument, "scan_limit must be >= 4");
  CutoffResult c;
  c.scan = scan_spectra(steady, grid, scan_limit, threads);
  c.M = cutoff_from_scan(c.scan, eta, scan_limit, &c.worst_beyond);
  return c;
}

void write_spectrum_csv_header(std::ostream& os) {
  os << "mode_k,mode_l,re_lambda,im_lambda,unstable_flag,trace0_re,trace0_im,trace1_re,trace1_im\n";
}

void write_spectrum_csv(std::ostream& os, ModeIndex mode, const CVec& lambdas, int N_unstable,
                        const std::vector<std::pair<cd, cd>>& traces) {
  for (int j = 0; j < lambdas.size(); ++j) {
    os << mode.k << ',' << mode.l << ',' << fmt(lambdas(j).real()) << ',' << fmt(lambdas(j).imag()) << ','
       << (j < N_unstable ? 1 : 0);
    if (j < int(traces.size()))
      os << ',' << fmt(traces[j].first.real()) << ',' << fmt(traces[j].first.imag()) << ','
         << fmt(traces[j].second.real()) << ',' << fmt(traces[j].second.imag());
    else
      os << ",,,,";
    os << '\n';
  }
}

}  // namespace cstab
