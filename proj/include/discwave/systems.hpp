#pragma once

#include <map>
#include <string>
#include <vector>

#include "discwave/symmetry.hpp"
#include "discwave/types.hpp"
#include "discwave/vector_field.hpp"

namespace discwave {

// A vector field bundled with its symmetry data and a starting guess for
// the orbit search.
struct SystemDef {
    std::string name;
    VectorField field;
    GroupElement h;
    int n = 1;
    int m = 1;
    Vec x_guess;
    double theta_guess = 0.0;
    std::map<std::string, double> params;
};

std::vector<std::string> builtin_names();

// Builtins: "twisted_oscillator" (planar limit cycle with an odd transverse
// direction, all multipliers in closed form), "lorenz" (sigma, eps, lambda
// parameters), "positive_unstable" (transverse multiplier > 1, outside the
// stabilizable window), "stable_oscillator" (all transverse directions
// contracting). Numeric params can be overridden by name.
SystemDef make_builtin(const std::string& name,
                       const std::map<std::string, double>& overrides = {});

}  // namespace discwave
