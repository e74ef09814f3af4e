#include "channelstab/pipeline.hpp"

#include <cmath>

#include "channelstab/errors.hpp"
#include "channelstab/io.hpp"
#include "channelstab/parallel.hpp"

namespace cstab {

std::vector<ModeIndex> actuated_modes(int M) {
  std::vector<ModeIndex> out;
  for (int k = 1; k <= M; ++k)
    for (int l = -M; l <= M; ++l)
      if (k * k + l * l <= M * M) out.push_back({k, l});
  return out;
}

int ControlSet::index(ModeIndex m) const {
  for (std::size_t i = 0; i < eigs.size(); ++i)
    if (eigs[i].mode == m) return int(i);
  return -1;
}

const GainSet* ControlSet::gains_for(ModeIndex m) const {
  for (const auto& g : gains)
    if (g.mode == m) return &g;
  return nullptr;
}

const EigenSet* ControlSet::eig_for(ModeIndex m) const {
  const int i = index(m);
  return i < 0 ? nullptr : &eigs[i];
}

std::vector<TraceRecord> trace_records(const std::vector<EigenSet>& eigs, bool l_zero) {
  std::vector<TraceRecord> out;
  for (const auto& e : eigs) {
    if ((e.mode.l == 0) != l_zero) continue;
    for (std::size_t j = 0; j < e.traces.size(); ++j)
      out.push_back({e.mode, int(j), e.traces[j].first, e.traces[j].second});
  }
  return out;
}

namespace {

CoefficientChoice choose_one(const std::vector<TraceRecord>& traces, std::optional<cd> forced, const char* name) {
  CoefficientChoice best = select_actuator_coefficient(traces);
  if (!forced) return best;
  const double m = coefficient_margin(traces, *forced);
  if (!(m > 1e-10))
    throw Error(ErrorKind::LemmaViolation, std::string("forced actuator coefficient ") + name + " = (" +
                                               fmt(forced->real()) + "," + fmt(forced->imag()) +
                                               ") has margin " + fmt(m),
                m);
  return {*forced, m};
}

}  // namespace

ActuatorChoice choose_actuators(const std::vector<EigenSet>& eigs, std::optional<cd> a, std::optional<cd> b) {
  const CoefficientChoice ca = choose_one(trace_records(eigs, false), a, "a");
  const CoefficientChoice cb = choose_one(trace_records(eigs, true), b, "b");
  return {ca.value, cb.value, ca.margin, cb.margin};
}

ControlSet build_controls(const SteadyState& steady, const Grid& grid, int M, const ControlOptions& opt) {
  ControlSet cs;
  cs.M = M;
  const auto modes = actuated_modes(M);
  const int count = int(modes.size());
  cs.pencils.resize(count);
  cs.eigs.resize(count);
  parallel_for(count, opt.threads, [&](int i) {
    cs.pencils[i] = assemble_pencil(modes[i], grid, steady);
    cs.eigs[i] = solve_pencil_eigen(cs.pencils[i], grid);
  });
  cs.actuator = choose_actuators(cs.eigs, opt.a, opt.b);
  cs.gains.resize(count);
  parallel_for(count, opt.threads, [&](int i) {
    const ModeIndex m = modes[i];
    GainSet g = build_gains(cs.eigs[i], cs.pencils[i], grid, cs.actuator.for_mode(m), opt.gamma_base);
    g.margin = m.l == 0 ? cs.actuator.margin_b : cs.actuator.margin_a;
    cs.gains[i] = std::move(g);
  });
  return cs;
}

GainSet conjugate_gains(const GainSet& g) {
  GainSet c = g;
  c.mode = {-g.mode.k, -g.mode.l};
  c.actuator = std::conj(g.actuator);
  c.lambdas = g.lambdas.conjugate();
  c.l_vec = g.l_vec.conjugate();
  c.c_vec = g.c_vec.conjugate();
  c.Lambda_sum = g.Lambda_sum.conjugate();
  for (auto& r : c.R_i) r = r.conjugate().eval();
  c.R_big = g.R_big.conjugate();
  c.row_functional = g.row_functional.conjugate();
  return c;
}

}  // namespace cstab
