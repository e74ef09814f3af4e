#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "channelstab/sim.hpp"

namespace cstab {

inline constexpr int kConfigSchemaVersion = 1;

struct EmitFlags {
  bool spectra = true;
  bool gains = true;
  bool energies = true;
  bool states = false;
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  PhysParams params;
  int n = 64;
  double eta_target = 0.1;
  int scan_limit = 8;
  int K_max = 0;  // 0 means M + 2
  double T = 10.0;
  double dt = 1e-3;
  int record_every = 10;
  std::string scheme = "trapezoid";
  int startup_steps = 2;
  InitialCondition ic;
  std::string output_dir = "channelstab_out";
  EmitFlags emit;
  int threads = 0;  // 0 means available parallelism
  std::string phi_tg = "kink";
  bool feedback = true;
  std::optional<cd> actuator_a;
  std::optional<cd> actuator_b;
  double gamma_base = 0.0;

  void validate() const;
};

TargetGuess parse_target_guess(const std::string& s);

RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
nlohmann::json to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& path);

// CHANNELSTAB_OUT, when set and non-empty, replaces output_dir.
std::filesystem::path resolve_output_dir(const RunConfig& c);

// "re,im" or "re"
cd parse_complex(const std::string& s);
// "k,l"
ModeIndex parse_mode(const std::string& s);

}  // namespace cstab
