#pragma once

#include <functional>
#include <utility>

#include "discwave/types.hpp"

namespace discwave {

// Autonomous right-hand side f and (optionally) its Jacobian. When no
// Jacobian is supplied, central finite differences with step
// cbrt(eps)*scale are used.
class VectorField {
  public:
    using EvalFn = std::function<Vec(const Vec&)>;
    using JacFn = std::function<Mat(const Vec&)>;

    VectorField() = default;
    VectorField(int dim, EvalFn eval, JacFn jac = nullptr)
        : dim_(dim), eval_(std::move(eval)), jac_(std::move(jac)) {}

    int dim() const { return dim_; }
    bool has_analytic_jacobian() const { return static_cast<bool>(jac_); }

    Vec operator()(const Vec& x) const;
    Mat jacobian(const Vec& x) const;
    Mat jacobian_fd(const Vec& x) const;

  private:
    int dim_ = 0;
    EvalFn eval_;
    JacFn jac_;
};

}  // namespace discwave
