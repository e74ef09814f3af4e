#pragma once

#include "channelstab/sim.hpp"

namespace fixtures {

// Default parameters at n = 64, computed once per process.
const cstab::Grid& grid64();
const cstab::SteadyState& steady64();
const cstab::ControlSet& controls64();

}  // namespace fixtures
