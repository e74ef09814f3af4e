#pragma once

#include "channelstab/types.hpp"

namespace cstab::detail {

struct GgevResult {
  CVec alpha;
  CVec beta;
  CMat VL;  // y^H A = lambda y^H B
  CMat VR;  // A x = lambda B x
};

// Dense QZ for A x = lambda B x (LAPACK zggev). Throws Numeric on failure.
GgevResult ggev(CMat A, CMat B, bool left, bool right);

}  // namespace cstab::detail
