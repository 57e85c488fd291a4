#pragma once

#include <string>
#include <vector>

#include "discwave/charfn.hpp"
#include "discwave/dde.hpp"
#include "discwave/floquet.hpp"
#include "discwave/hayes.hpp"

namespace discwave {

struct GainVerdict {
    double b = 0.0;
    DiskVerdict verdict;
};

struct Analysis {
    TwistedMonodromy tm;
    HypothesisReport hypotheses;
    GainInterval interval;
    std::vector<GainVerdict> gain_verdicts;
    double pattern_residual = 0.0;
    double power_identity_residual = 0.0;
    double liouville_residual = 0.0;
    bool stabilizable = false;
};

struct AnalyzeOptions {
    HypothesisTols tols;
    OdeOptions ode;
    double gain_cap = 1e3;
    std::vector<double> gain_samples;  // empty = 0 plus the interval midpoint
    int pattern_probes = 64;
};

Analysis analyze_wave(const DiscreteWave& wave, const AnalyzeOptions& opts = {});

struct VerifyRow {
    double b = 0.0;
    int k = 0;
    Complex oracle;     // discretized-operator eigenvalue
    Complex predicted;  // reciprocal characteristic root
    double rel_err = 0.0;
};

struct VerifyTable {
    std::vector<VerifyRow> rows;
    double max_rel_err = 0.0;
    bool pass = false;
    int grid_m = 0;
};

// Cross-check: top-k eigenvalues of the discretized twisted step against
// reciprocals of the k smallest characteristic roots, per gain.
VerifyTable verify_oracle(const DiscreteWave& wave, const std::vector<double>& gains, int grid_m,
                          int top_k = 5, double tol = 1e-2, const OdeOptions& ode = {});

struct DriftCheck {
    int m = 0;
    double drift_coarse = 0.0;  // max over top-k of |eig(m/2) - eig(m)|
    double drift_fine = 0.0;    // max over top-k of |eig(m) - eig(2m)|
    double ratio = 0.0;
};

// Richardson-style refinement check on grids m/2, m, 2m. Successive-grid
// eigenvalue drift cancels the common limit, so the ratio reflects the
// interpolation order rather than any reference solution.
DriftCheck oracle_drift(const DiscreteWave& wave, double b, int m, int top_k = 5,
                        const OdeOptions& ode = {});

}  // namespace discwave
