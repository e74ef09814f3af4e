#pragma once

#include <optional>
#include <string>
#include <vector>

#include "channelstab/config.hpp"

namespace cstab {

inline constexpr int kCriterionCount = 9;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;  // wall time, reported on the console only
};

std::string criterion_name(int id);

// Runs acceptance checks against one configuration. Upstream stages are
// computed once and shared between criteria.
class VerifySuite {
 public:
  explicit VerifySuite(RunConfig cfg);

  CriterionResult run(int id);
  std::vector<CriterionResult> run_all();

  const Grid& grid();
  const SteadyState& steady();
  const CutoffResult& cutoff();
  const ControlSet& controls();

 private:
  CriterionResult analytic_spectra();
  CriterionResult adjoint_identity();
  CriterionResult biorthonormality();
  CriterionResult lifting_identity();
  CriterionResult spectral_gap();
  CriterionResult closed_loop_spectrum();
  CriterionResult trajectory_decay();
  CriterionResult k0_branch();
  CriterionResult determinism();

  RunConfig cfg_;
  int threads_;
  std::optional<Grid> grid_;
  std::optional<SteadyState> steady_;
  std::optional<CutoffResult> cutoff_;
  double cutoff_seconds_ = 0.0;
  std::optional<ControlSet> controls_;
};

nlohmann::json to_json(const CriterionResult& r);

}  // namespace cstab
