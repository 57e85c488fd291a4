#include "discwave/vector_field.hpp"

#include <cmath>
#include <limits>

namespace discwave {

Vec VectorField::operator()(const Vec& x) const {
    if (!eval_) throw Error(ErrorCode::internal, "vector field not initialized");
    if (x.size() != dim_)
        throw Error(ErrorCode::invalid_argument, "vector field dimension mismatch");
    return eval_(x);
}

Mat VectorField::jacobian(const Vec& x) const {
    if (jac_) {
        if (x.size() != dim_)
            throw Error(ErrorCode::invalid_argument, "vector field dimension mismatch");
        return jac_(x);
    }
    return jacobian_fd(x);
}

Mat VectorField::jacobian_fd(const Vec& x) const {
    const double eps = std::numeric_limits<double>::epsilon();
    Mat j(dim_, dim_);
    Vec xp = x, xm = x;
    for (int c = 0; c < dim_; ++c) {
        const double step = std::cbrt(eps) * std::max(1.0, std::abs(x[c]));
        xp[c] = x[c] + step;
        xm[c] = x[c] - step;
        j.col(c) = ((*this)(xp) - (*this)(xm)) / (xp[c] - xm[c]);
        xp[c] = x[c];
        xm[c] = x[c];
    }
    return j;
}

}  // namespace discwave
