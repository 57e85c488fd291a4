#pragma once

#include <string>
#include <vector>

#include "discwave/types.hpp"
#include "discwave/vector_field.hpp"

namespace discwave {

class DiscreteWave;

struct GroupElement {
    Mat matrix;
    std::string label;
    int declared_order = 0;  // 0 = not declared
};

bool check_orthogonal(const GroupElement& g, double tol = 1e-12);

// Max over the declared order k of ||g^j - I|| proxies is not needed;
// only g^k == I matters.
double order_residual(const GroupElement& g);

// Max over samples of ||f(g x) - g f(x)||.
double check_equivariance(const VectorField& f, const GroupElement& g,
                          const std::vector<Vec>& samples);

// The pattern data (h, theta_h) with theta_h = (m/n) * period.
struct SpatioTemporalSymmetry {
    GroupElement h;
    double theta_h = 0.0;
    int n = 1;
    int m = 1;
    double period = 0.0;

    void validate() const;  // throws on inconsistent data
};

// Max over n_probe times t of ||h x(t) - x(t + theta_h)|| along the wave.
double pattern_residual(const DiscreteWave& wave, const SpatioTemporalSymmetry& sym, int n_probe);

}  // namespace discwave
