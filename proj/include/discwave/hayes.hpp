#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "discwave/floquet.hpp"
#include "discwave/types.hpp"

namespace discwave {

struct RegionPoint {
    double alpha = 0.0;
    double beta = 0.0;
};

// Boundary curve (omega cos w / sin w, -w / sin w); branch k lives on
// omega in (pi k, pi (k+1)). The k = 0 branch bounds the stability region.
RegionPoint curve_c(double omega, int branch = 0);

enum class RegionClass { interior, on_r, on_c, exterior };

// Membership in the set where every root of -z + alpha + beta e^{-z} has
// negative real part, bounded by the line alpha + beta = 0 (alpha < 1) and
// the k = 0 boundary curve.
RegionClass in_stability_region(const RegionPoint& p, double bnd_tol = 1e-9);

struct PerEigInterval {
    Complex mu;
    double b_lo = 0.0;
    double b_hi = 0.0;
    bool empty = true;
    std::string reason;
};

struct GainInterval {
    double b_lo = 0.0;
    double b_hi = 0.0;
    bool empty = true;
    bool unbounded_below = false;  // reported as (-gain_cap, 0)
    Complex binding_mu;
    std::vector<PerEigInterval> per_eig;
    std::string reason;
};

// Open interval of gains b for which the factor of mu* has every root of
// 1 - mu* z e^{b theta (1-z)} strictly outside the unit circle. Requires
// -e^2 < mu* < -1; the endpoints are b_hi = -ln(-mu*)/(2 theta) and
// b_lo = -omega / (sin(omega) theta) with omega cot(omega/2) = ln(-mu*).
GainInterval gain_interval_single(double mu_star, double theta_h);

// Combined interval over the whole spectrum: (-gain_cap, 0) when nothing is
// outside the unit circle, otherwise the interval of the most negative
// unstable eigenvalue (nesting makes it binding).
GainInterval gain_interval_combined(const TwistedMonodromy& tm, double theta_h,
                                    const HypothesisTols& tols, double gain_cap = 1e3);

struct RegionChartOptions {
    int samples_per_curve = 400;
    int higher_branches = 2;
    double r_alpha_min = -8.0;
    double r_alpha_max = 1.0;
};

// CSV rows (curve_id, omega, alpha, beta) for the line R, the boundary
// curve and higher branches.
void emit_region_chart(std::ostream& out, const RegionChartOptions& opts = {});

// CSV rows (b, bstar, alpha, beta, crossing) for the path
// (alpha, beta) = (lambda* + b*, b*) of a given lambda* = ln(-mu*).
void emit_gain_path(std::ostream& out, double lambda_star, double theta_h, int samples = 200);

}  // namespace discwave
