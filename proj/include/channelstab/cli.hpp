#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "channelstab/errors.hpp"

namespace cstab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCriterion = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitNumeric = 4;

int exit_code(ErrorKind kind);

// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace cstab
