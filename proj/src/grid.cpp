#include "channelstab/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "channelstab/errors.hpp"

namespace cstab {

double ModeIndex::radius() const { return std::sqrt(double(k) * k + double(l) * l); }

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Config: return "config";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::UnsupportedMode: return "unsupported-mode";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Defective: return "defective";
    case ErrorKind::LemmaViolation: return "lemma-violation";
    case ErrorKind::Invertibility: return "invertibility";
    case ErrorKind::GammaSelection: return "gamma-selection";
    case ErrorKind::WellPosedness: return "well-posedness";
    case ErrorKind::ScanExhausted: return "scan-exhausted";
  }
  return "unknown";
}

namespace {

// Clenshaw-Curtis weights on [-1,1] for x_j = cos(pi j / N).
RVec clenshaw_curtis(int N) {
  const double pi = std::numbers::pi;
  RVec w = RVec::Zero(N + 1);
  RVec v = RVec::Ones(N - 1);
  if (N % 2 == 0) {
    w(0) = w(N) = 1.0 / (double(N) * N - 1.0);
    for (int k = 1; k < N / 2; ++k)
      for (int j = 1; j < N; ++j) v(j - 1) -= 2.0 * std::cos(2.0 * k * pi * j / N) / (4.0 * k * k - 1.0);
    for (int j = 1; j < N; ++j) v(j - 1) -= std::cos(pi * j) / (double(N) * N - 1.0);
  } else {
    w(0) = w(N) = 1.0 / (double(N) * N);
    for (int k = 1; k <= (N - 1) / 2; ++k)
      for (int j = 1; j < N; ++j) v(j - 1) -= 2.0 * std::cos(2.0 * k * pi * j / N) / (4.0 * k * k - 1.0);
  }
  for (int j = 1; j < N; ++j) w(j) = 2.0 * v(j - 1) / N;
  return w;
}

}  // namespace

Grid build_grid(int n) {
  if (n < 16 || n % 2 != 0)
    throw Error(ErrorKind::InvalidArgument, "grid size must be even and >= 16, got " + std::to_string(n));
  const double pi = std::numbers::pi;
  const int N = n - 1;
  Grid g;
  g.n = n;
  g.nodes.resize(n);
  for (int j = 0; j < n / 2; ++j) {
    const double s = std::sin(pi * j / (2.0 * N));
    g.nodes(j) = s * s;
    g.nodes(n - 1 - j) = 1.0 - g.nodes(j);
  }
  g.nodes(0) = 0.0;
  g.nodes(n - 1) = 1.0;

  // d/dx on x_j = cos(theta_j), with differences from the sine identity
  RMat D = RMat::Zero(n, n);
  auto c = [&](int j) { return ((j == 0 || j == N) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double ti = pi * i / N, tj = pi * j / N;
      const double dx = -2.0 * std::sin(0.5 * (ti + tj)) * std::sin(0.5 * (ti - tj));
      D(i, j) = c(i) / (c(j) * dx);
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) {
        const double a = 0.5 * (D(i, j) - D(n - 1 - i, n - 1 - j));
        D(i, j) = a;
        D(n - 1 - i, n - 1 - j) = -a;
      }
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) s += D(i, j);
    D(i, i) = -s;
  }
  // y = (1 - x)/2
  g.D1 = -2.0 * D;
  g.D2 = g.D1 * g.D1;
  g.D3 = g.D2 * g.D1;
  g.D4 = g.D3 * g.D1;

  RVec w = 0.5 * clenshaw_curtis(N);
  for (int j = 0; j < n / 2; ++j) {
    const double a = 0.5 * (w(j) + w(n - 1 - j));
    w(j) = w(n - 1 - j) = a;
  }
  g.weights = w / w.sum();
  return g;
}

cd inner(const CVec& f, const CVec& g, const Grid& grid) {
  if (f.size() != grid.n || g.size() != grid.n)
    throw Error(ErrorKind::InvalidArgument, "inner: vector length does not match grid");
  cd s = 0.0;
  for (int j = 0; j < grid.n; ++j) s += grid.weights(j) * f(j) * std::conj(g(j));
  return s;
}

double norm2(const CVec& f, const Grid& grid) {
  if (f.size() != grid.n) throw Error(ErrorKind::InvalidArgument, "norm2: vector length does not match grid");
  double s = 0.0;
  for (int j = 0; j < grid.n; ++j) s += grid.weights(j) * std::norm(f(j));
  return s;
}

RVec reflect(const RVec& f, const Grid& grid) {
  if (f.size() != grid.n) throw Error(ErrorKind::InvalidArgument, "reflect: vector length does not match grid");
  return reflect(f);
}

CVec reflect(const CVec& f, const Grid& grid) {
  if (f.size() != grid.n) throw Error(ErrorKind::InvalidArgument, "reflect: vector length does not match grid");
  return reflect(f);
}

CVec block(const CVec& x, int n, int b) { return x.segment(b * n, n); }

}  // namespace cstab
