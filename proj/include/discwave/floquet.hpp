#pragma once

#include <string>
#include <vector>

#include "discwave/flow.hpp"
#include "discwave/types.hpp"

namespace discwave {

struct TwistedMonodromy {
    Mat y_theta;   // Y(theta_h)
    Mat y_h;       // h^{-1} Y(theta_h)
    CVec spectrum;
    int trivial_index = -1;   // eigenvalue nearest 1
    double backward_error = 0.0;
};

// All eigenvalues of a dense real matrix, plus the max backward error
// ||A v - mu v|| / ||A|| over the computed pairs.
CVec eigen_all(const Mat& a, double* backward_error = nullptr);

TwistedMonodromy twisted_monodromy(const DiscreteWave& wave, const OdeOptions& opts);

struct HypothesisTols {
    double eig_tol = 1e-6;      // |mu - 1| below this counts as the trivial eigenvalue
    double sep_floor = 1e-4;    // second-nearest distance to 1 must exceed this
    double im_tol = 1e-8;       // scaled by max(1, |mu|) for the realness test
    double margin_floor = 0.0;  // shrinks the open window (-e^2, -1)
};

struct HypothesisReport {
    bool trivial_simple = false;
    bool unit_circle_clear = false;
    std::vector<Complex> unstable;
    bool all_in_window = false;
    double margin = 0.0;  // min distance of unstable eigenvalues to {-e^2, -1}
    std::string diagnosis;

    bool pass() const { return trivial_simple && unit_circle_clear && all_in_window; }
};

HypothesisReport check_hypotheses(const TwistedMonodromy& tm, const HypothesisTols& tols);

// || Y(p)^m - h^n Y_h^n ||_F / || Y(p)^m ||_F.
double verify_power_identity(const DiscreteWave& wave, const TwistedMonodromy& tm,
                             const OdeOptions& opts);

// Relative error of det(Y_h) against det(h^{-1}) exp(int_0^theta trace f'(x*(s)) ds).
double liouville_residual(const DiscreteWave& wave, const TwistedMonodromy& tm,
                          const OdeOptions& opts);

}  // namespace discwave
