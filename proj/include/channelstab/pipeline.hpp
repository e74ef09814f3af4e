#pragma once

#include <optional>
#include <vector>

#include "channelstab/feedback.hpp"

namespace cstab {

struct ControlOptions {
  int threads = 1;
  std::optional<cd> a;  // forced actuator coefficients
  std::optional<cd> b;
  double gamma_base = 0.0;
};

// Actuated modes of the canonical half plane (k > 0) with radius <= M.
std::vector<ModeIndex> actuated_modes(int M);

struct ControlSet {
  int M = 1;
  ActuatorChoice actuator;
  std::vector<ModePencil> pencils;
  std::vector<EigenSet> eigs;
  std::vector<GainSet> gains;

  int index(ModeIndex m) const;  // -1 when m is not actuated
  const GainSet* gains_for(ModeIndex m) const;
  const EigenSet* eig_for(ModeIndex m) const;
};

std::vector<TraceRecord> trace_records(const std::vector<EigenSet>& eigs, bool l_zero);

// a over the l != 0 family, b over l = 0. Forced values are checked against
// the traces and rejected when their margin vanishes.
ActuatorChoice choose_actuators(const std::vector<EigenSet>& eigs, std::optional<cd> a = {},
                                std::optional<cd> b = {});

ControlSet build_controls(const SteadyState& steady, const Grid& grid, int M, const ControlOptions& opt = {});

// Gains of mode (-k,-l) obtained from those of (k,l).
GainSet conjugate_gains(const GainSet& g);

}  // namespace cstab
