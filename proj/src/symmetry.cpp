#include "discwave/symmetry.hpp"

#include <cmath>

#include "discwave/flow.hpp"

namespace discwave {

bool check_orthogonal(const GroupElement& g, double tol) {
    if (g.matrix.rows() != g.matrix.cols())
        throw Error(ErrorCode::invalid_argument, "group element matrix is not square");
    const auto n = g.matrix.rows();
    const Mat gram = g.matrix.transpose() * g.matrix;
    return (gram - Mat::Identity(n, n)).norm() <= tol;
}

double order_residual(const GroupElement& g) {
    if (g.declared_order <= 0) return 0.0;
    const auto n = g.matrix.rows();
    Mat power = Mat::Identity(n, n);
    for (int k = 0; k < g.declared_order; ++k) power = g.matrix * power;
    return (power - Mat::Identity(n, n)).norm();
}

double check_equivariance(const VectorField& f, const GroupElement& g,
                          const std::vector<Vec>& samples) {
    if (samples.empty()) throw Error(ErrorCode::invalid_argument, "no equivariance samples");
    double worst = 0.0;
    for (const Vec& x : samples) {
        const double res = (f(g.matrix * x) - g.matrix * f(x)).norm();
        worst = std::max(worst, res);
    }
    return worst;
}

void SpatioTemporalSymmetry::validate() const {
    if (n < 1 || m < 1 || m > n)
        throw Error(ErrorCode::invalid_argument, "pattern integers must satisfy 1 <= m <= n");
    if (!(theta_h > 0.0) || !(period > 0.0))
        throw Error(ErrorCode::invalid_argument, "pattern times must be positive");
    const double expected = period * static_cast<double>(m) / static_cast<double>(n);
    if (std::abs(theta_h - expected) > 1e-10 * std::max(1.0, period))
        throw Error(ErrorCode::invalid_argument, "theta_h is not (m/n) * period");
    if (!check_orthogonal(h, 1e-10))
        throw Error(ErrorCode::invalid_argument, "group element is not orthogonal");
}

double pattern_residual(const DiscreteWave& wave, const SpatioTemporalSymmetry& sym,
                        int n_probe) {
    if (n_probe < 1) throw Error(ErrorCode::invalid_argument, "n_probe must be positive");
    double worst = 0.0;
    for (int i = 0; i < n_probe; ++i) {
        const double t = sym.period * static_cast<double>(i) / static_cast<double>(n_probe);
        const double res = (sym.h.matrix * wave.state(t) - wave.state(t + sym.theta_h)).norm();
        worst = std::max(worst, res);
    }
    return worst;
}

}  // namespace discwave
