#include "discwave/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace discwave {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double initial_step(const Rhs& rhs, double t0, const Vec& y0, const Vec& f0, double dir,
                    double span, const OdeOptions& opts) {
    const auto n = y0.size();
    double d0 = 0.0, dd1 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = opts.atol + opts.rtol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        dd1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / static_cast<double>(n));
    dd1 = std::sqrt(dd1 / static_cast<double>(n));
    double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
    h0 = std::min(h0, span);
    const Vec y1 = y0 + dir * h0 * f0;
    const Vec f1 = rhs(t0 + dir * h0, y1);
    double d2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = opts.atol + opts.rtol * std::abs(y0[i]);
        const double df = (f1[i] - f0[i]) / sc;
        d2 += df * df;
    }
    d2 = std::sqrt(d2 / static_cast<double>(n)) / h0;
    double h1;
    if (std::max(dd1, d2) <= 1e-15)
        h1 = std::max(1e-6, h0 * 1e-3);
    else
        h1 = std::pow(0.01 / std::max(dd1, d2), 0.2);
    return std::min({100.0 * h0, h1, span});
}

}  // namespace

Vec DenseStep::eval(double t) const {
    const double u = (t - t0) / h;
    return c0 + u * (c1 + (1.0 - u) * (c2 + u * (c3 + (1.0 - u) * c4)));
}

Vec Trajectory::eval(double t) const {
    if (steps_.empty()) {
        if (final_state_.size() == 0)
            throw Error(ErrorCode::internal, "evaluation of empty trajectory");
        return final_state_;
    }
    const double lo = std::min(t_begin_, t_end_), hi = std::max(t_begin_, t_end_);
    const double slack = 1e-8 * std::max(1.0, hi - lo);
    if (t < lo - slack || t > hi + slack) {
        std::ostringstream msg;
        msg << "trajectory evaluation at t=" << t << " outside [" << lo << ", " << hi << "]";
        throw Error(ErrorCode::invalid_argument, msg.str());
    }
    const bool fwd = t_end_ >= t_begin_;
    const auto it = std::upper_bound(
        steps_.begin(), steps_.end(), t,
        [fwd](double tv, const DenseStep& s) { return fwd ? tv < s.t0 : tv > s.t0; });
    const std::size_t i =
        (it == steps_.begin()) ? 0 : static_cast<std::size_t>(it - steps_.begin()) - 1;
    return steps_[i].eval(t);
}

Trajectory integrate(const Rhs& rhs, const Vec& x0, double t0, double t1,
                     const OdeOptions& opts) {
    Trajectory traj;
    traj.t_begin_ = t0;
    traj.t_end_ = t1;
    if (t1 == t0) {
        traj.final_state_ = x0;
        return traj;
    }
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const auto n = x0.size();

    Vec y = x0;
    double t = t0;
    Vec k1 = rhs(t, y);
    traj.n_rhs_evals_ = 1;

    double h = initial_step(rhs, t0, y, k1, dir, span, opts);
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);

    Vec k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y1(n), err_vec(n);
    bool last_rejected = false;
    long steps_taken = 0;

    while (dir * (t1 - t) > 0.0) {
        if (++steps_taken > opts.max_steps)
            throw Error(ErrorCode::no_convergence, "integration step budget exhausted");
        h = std::min(h, std::abs(t1 - t));
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            std::ostringstream msg;
            msg << "step size underflow at t=" << t;
            throw Error(ErrorCode::no_convergence, msg.str());
        }
        const double hs = dir * h;

        k2 = rhs(t + c2 * hs, y + hs * (a21 * k1));
        k3 = rhs(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        k4 = rhs(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = rhs(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = rhs(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y1 = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        k7 = rhs(t + hs, y1);
        traj.n_rhs_evals_ += 6;

        err_vec = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += (err_vec[i] / sc) * (err_vec[i] / sc);
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (err <= 1.0) {
            DenseStep step;
            step.t0 = t;
            step.h = hs;
            step.c0 = y;
            step.c1 = y1 - y;
            step.c2 = hs * k1 - step.c1;
            step.c3 = step.c1 - hs * k7 - step.c2;
            step.c4 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            traj.steps_.push_back(std::move(step));

            t += hs;
            y.swap(y1);
            k1.swap(k7);
            ++traj.n_accepted_;

            double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
            h *= fac;
            if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
            last_rejected = false;
        } else {
            ++traj.n_rejected_;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
        }
    }
    traj.final_state_ = y;
    return traj;
}

Trajectory integrate(const VectorField& f, const Vec& x0, double t0, double t1,
                     const OdeOptions& opts) {
    return integrate([&f](double, const Vec& y) { return f(y); }, x0, t0, t1, opts);
}

}  // namespace discwave
