#pragma once

#include <functional>
#include <vector>

#include "discwave/types.hpp"
#include "discwave/vector_field.hpp"

namespace discwave {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double max_step = 0.0;  // 0 = unlimited
    long max_steps = 10'000'000;
};

// One accepted step with the coefficients of the quartic interpolant
// x(t0 + u*h) = c0 + u*(c1 + (1-u)*(c2 + u*(c3 + (1-u)*c4))), u in [0,1].
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    Vec c0, c1, c2, c3, c4;

    Vec eval(double t) const;
};

using Rhs = std::function<Vec(double, const Vec&)>;

// Dense-output solution of an initial value problem on [t_begin, t_end].
class Trajectory {
  public:
    Trajectory() = default;

    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    Vec eval(double t) const;
    const Vec& final_state() const { return final_state_; }

    const std::vector<DenseStep>& steps() const { return steps_; }
    long n_accepted() const { return n_accepted_; }
    long n_rejected() const { return n_rejected_; }
    long n_rhs_evals() const { return n_rhs_evals_; }

  private:
    friend Trajectory integrate(const Rhs& rhs, const Vec& x0, double t0, double t1,
                                const OdeOptions& opts);
    double t_begin_ = 0.0;
    double t_end_ = 0.0;
    Vec final_state_;
    std::vector<DenseStep> steps_;
    long n_accepted_ = 0;
    long n_rejected_ = 0;
    long n_rhs_evals_ = 0;
};

// Dormand-Prince 5(4) embedded pair with 4th-order dense output.
Trajectory integrate(const Rhs& rhs, const Vec& x0, double t0, double t1, const OdeOptions& opts);

// Same, for an autonomous field.
Trajectory integrate(const VectorField& f, const Vec& x0, double t0, double t1,
                     const OdeOptions& opts);

}  // namespace discwave
