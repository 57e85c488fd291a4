#pragma once

#include <vector>

#include "discwave/floquet.hpp"
#include "discwave/types.hpp"

namespace discwave {

// Scalar characteristic function d(z) = prod_j (1 - z mu_j e^{b*(1-z)})
// with b* = b theta_h, and the matrix family Delta(z) = I - z Y_h e^{b*(1-z)}.
// Zeros of d are reciprocals of the nonzero controlled twisted-step
// eigenvalues.
struct CharFunction {
    CVec mu;
    double b = 0.0;
    double theta_h = 0.0;
    Mat y_h;  // optional; empty when constructed from eigenvalues only

    double bstar() const { return b * theta_h; }

    static CharFunction from_monodromy(const TwistedMonodromy& tm, double b, double theta_h);
    static CharFunction from_eigs(CVec mu, double b, double theta_h);
};

Complex eval_d(const CharFunction& cf, Complex z);
Complex eval_d_prime(const CharFunction& cf, Complex z);
// Sum over factors of f_j'/f_j in the overflow-safe form (1 - b* z)/(z - q_j),
// q_j = e^{-b*(1-z)} / mu_j.
Complex log_derivative(const CharFunction& cf, Complex z);
CMat eval_delta(const CharFunction& cf, Complex z);  // requires y_h

struct SimplicityAtOne {
    bool is_root = false;
    double d_abs = 0.0;        // |d(1)|
    Complex d_prime;           // analytic derivative at 1
};

SimplicityAtOne simplicity_at_one(const CharFunction& cf, double tol = 1e-6);

struct RootOptions {
    double root_tol = 1e-11;       // |d(root)| relative to local factor scale
    int homotopy_steps = 20;       // continuation in b from the control-off roots
    int newton_max_iter = 60;
    double cluster_tol = 1e-8;     // dedup distance, scaled by max(1, |z|)
    int max_nudges = 6;            // contour nudges of +-1% when audit is ill-posed
};

struct RootSet {
    std::vector<Complex> roots;
    std::vector<int> multiplicity;
    std::vector<double> residuals;  // |d(root)|
    double radius = 0.0;            // possibly nudged
    long winding = 0;               // argument-principle count on |z| = radius

    int total_multiplicity() const;
};

// All roots of d with |z| < R. The winding number of d over |z| = R is the
// authority: a mismatch with the located roots is a hard error.
RootSet roots_in_disk(const CharFunction& cf, double radius, const RootOptions& opts = {});

// Grows the search radius until at least k roots are inside (or the radius
// cap is hit); returns the k smallest-modulus roots, multiplicity-expanded.
std::vector<Complex> smallest_roots(const CharFunction& cf, int k, double radius_cap = 1e6,
                                    const RootOptions& opts = {});

struct DiskVerdict {
    bool stable = false;    // only root with |z| <= 1 + margin is the simple z = 1
    int roots_on_or_inside = 0;
    bool unit_root_present = false;
    bool unit_root_simple = false;
    std::vector<Complex> offending;  // roots other than z = 1 with |z| <= 1 + margin
};

DiskVerdict unit_disk_verdict(const CharFunction& cf, double margin = 1e-6,
                              const RootOptions& opts = {});

struct ExpCorrespondence {
    std::vector<Complex> lambdas;   // roots of G(z) = -z + alpha + beta e^{-z}
    std::vector<int> multiplicity;
    std::vector<Complex> zs;        // e^{-lambda}
    double max_f_residual = 0.0;    // max |F(e^{-lambda})|, F(z) = 1 - z e^alpha e^{beta z}
    long strip_count = 0;           // winding count over the strip rectangle
};

// Roots of G in the strip |Im z| <= im_window (Re range derived from
// a-priori bounds), paired with their images under z -> e^{-z}.
ExpCorrespondence exp_correspondence(Complex alpha, Complex beta, double im_window,
                                     const RootOptions& opts = {});

}  // namespace discwave
