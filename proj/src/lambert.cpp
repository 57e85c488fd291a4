#include "discwave/lambert.hpp"

#include <cmath>
#include <numbers>

namespace discwave {

namespace {
constexpr double pi = std::numbers::pi;

Complex seed(Complex z, int k) {
    // Near the branch point -1/e the k = 0 and k = -1 branches meet;
    // expand in p = sqrt(2(ez + 1)). The window reaches along the cut on
    // (-inf, -1/e), where a real seed would strand the iteration on the
    // real axis even though both roots are complex.
    if (k == 0 || k == -1) {
        const Complex zeta = 2.0 * (std::numbers::e * z + 1.0);
        if (std::abs(zeta) < 2.5 && z.real() < -0.2) {
            Complex p = std::sqrt(zeta);
            if (k == -1) p = -p;
            return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
        }
    }
    if (k == 0 && std::abs(z) < 0.8) return z * (1.0 - z + 1.5 * z * z);
    const Complex l1 = std::log(z) + Complex(0.0, 2.0 * pi * k);
    if (std::abs(l1) < 0.5) return Complex(0.5671432904097838, 0.0);
    return l1 - std::log(l1);
}

}  // namespace

Complex lambert_w(Complex z, int k) {
    if (z == 0.0) {
        if (k == 0) return 0.0;
        throw Error(ErrorCode::invalid_argument, "lambert_w branch k != 0 diverges at 0");
    }
    Complex w = seed(z, k);
    for (int iter = 0; iter < 80; ++iter) {
        const Complex ew = std::exp(w);
        const Complex f = w * ew - z;
        // already at a root (e.g. the seed is exact at the branch point,
        // where the Halley denominator is 0/0)
        if (std::abs(f) <= 1e-16 * (std::abs(z) + std::abs(w * ew))) break;
        const Complex fp = ew * (w + 1.0);
        const Complex step = f / (fp - (w + 2.0) * f / (2.0 * w + 2.0));
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        w -= step;
        if (std::abs(step) <= 1e-14 * (1.0 + std::abs(w))) break;
    }
    return w;
}

}  // namespace discwave
