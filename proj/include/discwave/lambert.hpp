#pragma once

#include "discwave/types.hpp"

namespace discwave {

// Branch k of the Lambert W function: w with w e^w = z, Im w in the
// branch-k strip. Halley iteration from a branch-aware seed; accurate to
// ~1e-13 away from the branch cut, and series-seeded near z = -1/e.
Complex lambert_w(Complex z, int k);

}  // namespace discwave
