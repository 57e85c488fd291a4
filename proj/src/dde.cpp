#include "discwave/dde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "discwave/floquet.hpp"

namespace discwave {

namespace {

// 4th-order finite-difference slopes on a uniform grid (5-point stencils,
// one-sided at the ends).
std::vector<Vec> grid_slopes(const std::vector<Vec>& v, double dt) {
    const int m = static_cast<int>(v.size()) - 1;
    std::vector<Vec> s(v.size());
    const double c = 1.0 / (12.0 * dt);
    for (int k = 0; k <= m; ++k) {
        if (k >= 2 && k <= m - 2)
            s[k] = c * (v[k - 2] - 8.0 * v[k - 1] + 8.0 * v[k + 1] - v[k + 2]);
        else if (k == 0)
            s[k] = c * (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]);
        else if (k == 1)
            s[k] = c * (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]);
        else if (k == m - 1)
            s[k] = c * (3.0 * v[m] + 10.0 * v[m - 1] - 18.0 * v[m - 2] + 6.0 * v[m - 3] -
                        v[m - 4]);
        else
            s[k] = c * (25.0 * v[m] - 48.0 * v[m - 1] + 36.0 * v[m - 2] - 16.0 * v[m - 3] +
                        3.0 * v[m - 4]);
    }
    return s;
}

}  // namespace

HistorySegment::HistorySegment(double theta, std::vector<Vec> nodes)
    : theta_(theta), nodes_(std::move(nodes)) {
    if (!(theta_ > 0.0)) throw Error(ErrorCode::invalid_argument, "delay must be positive");
    if (nodes_.size() < 5)
        throw Error(ErrorCode::invalid_argument, "history grid needs at least 5 nodes");
    slopes_ = grid_slopes(nodes_, theta_ / m());
}

HistorySegment HistorySegment::sample(const std::function<Vec(double)>& fn, double theta,
                                      int m) {
    if (m < 4) throw Error(ErrorCode::invalid_argument, "history grid needs m >= 4");
    std::vector<Vec> nodes(m + 1);
    for (int k = 0; k <= m; ++k) nodes[k] = fn(-theta + theta * k / m);
    return HistorySegment(theta, std::move(nodes));
}

Vec HistorySegment::eval(double t) const {
    const double slack = 1e-9 * theta_;
    if (t < -theta_ - slack || t > slack) {
        std::ostringstream msg;
        msg << "history evaluated at " << t << " outside [" << -theta_ << ", 0]";
        throw Error(ErrorCode::internal, msg.str());
    }
    const double dt = theta_ / m();
    const double s = (t + theta_) / dt;
    const int k = std::clamp(static_cast<int>(std::floor(s)), 0, m() - 1);
    const double u = s - k;
    const double h00 = (2.0 * u - 3.0) * u * u + 1.0;
    const double h10 = ((u - 2.0) * u + 1.0) * u;
    const double h01 = (3.0 - 2.0 * u) * u * u;
    const double h11 = (u - 1.0) * u * u;
    return h00 * nodes_[k] + (h10 * dt) * slopes_[k] + h01 * nodes_[k + 1] +
           (h11 * dt) * slopes_[k + 1];
}

Vec ControlledRun::state(double t) const {
    for (const auto& seg : segments) {
        const double lo = std::min(seg.t_begin(), seg.t_end());
        const double hi = std::max(seg.t_begin(), seg.t_end());
        if (t <= hi + 1e-12 * std::max(1.0, hi) && t >= lo - 1e-12 * std::max(1.0, hi))
            return seg.eval(std::clamp(t, lo, hi));
    }
    throw Error(ErrorCode::invalid_argument, "simulation evaluated outside its time range");
}

ControlledRun simulate_controlled(const VectorField& f, const GroupElement& h, double theta,
                                  double b, const HistorySegment& initial, double t_end,
                                  const OdeOptions& opts, int samples_per_delay) {
    if (!(theta > 0.0) || !(t_end > 0.0))
        throw Error(ErrorCode::invalid_argument, "delay and horizon must be positive");
    ControlledRun run;
    run.t_end = t_end;
    const Mat& hm = h.matrix;

    const auto past = [&](double t) -> Vec {
        if (t <= 0.0) return initial.eval(std::max(t, -theta));
        for (const auto& seg : run.segments)
            if (t <= seg.t_end() + 1e-12 * std::max(1.0, seg.t_end()))
                return seg.eval(std::min(t, seg.t_end()));
        throw Error(ErrorCode::internal, "delayed lookup ahead of stored history");
    };

    OdeOptions step_opts = opts;
    step_opts.max_step =
        (opts.max_step > 0.0) ? std::min(opts.max_step, theta / 8.0) : theta / 8.0;

    const int n_steps = static_cast<int>(std::ceil(t_end / theta - 1e-12));
    for (int j = 0; j < n_steps; ++j) {
        const double t0 = j * theta;
        const double t1 = std::min((j + 1) * theta, t_end);
        const Vec x0 = (j == 0) ? initial.eval(0.0) : run.segments.back().final_state();
        const Rhs rhs = [&](double t, const Vec& y) {
            return Vec(f(y) + b * (y - hm * past(t - theta)));
        };
        run.segments.push_back(integrate(rhs, x0, t0, t1, step_opts));
    }

    const int n_samples = std::max(2, static_cast<int>(std::ceil(t_end / theta)) *
                                          samples_per_delay);
    for (int i = 0; i <= n_samples; ++i) {
        SimSample sample;
        sample.t = t_end * i / n_samples;
        sample.x = run.state(sample.t);
        sample.control_norm = (sample.x - hm * past(sample.t - theta)).norm();
        run.samples.push_back(std::move(sample));
    }
    return run;
}

ControlledRun simulate_linearized(const DiscreteWave& wave, double b, double t_start,
                                  const HistorySegment& initial, double duration,
                                  const OdeOptions& opts) {
    const double theta = wave.theta_h();
    ControlledRun run;
    run.t_end = t_start + duration;
    const Mat& hm = wave.sym().h.matrix;

    const auto past = [&](double t) -> Vec {
        if (t <= t_start) return initial.eval(std::max(t - t_start, -theta));
        for (const auto& seg : run.segments)
            if (t <= seg.t_end() + 1e-12 * std::max(1.0, std::abs(seg.t_end())))
                return seg.eval(std::min(t, seg.t_end()));
        throw Error(ErrorCode::internal, "delayed lookup ahead of stored history");
    };

    OdeOptions step_opts = opts;
    step_opts.max_step =
        (opts.max_step > 0.0) ? std::min(opts.max_step, theta / 8.0) : theta / 8.0;

    const int n_steps = static_cast<int>(std::ceil(duration / theta - 1e-12));
    for (int j = 0; j < n_steps; ++j) {
        const double t0 = t_start + j * theta;
        const double t1 = std::min(t_start + (j + 1) * theta, t_start + duration);
        const Vec y0 = (j == 0) ? initial.eval(0.0) : run.segments.back().final_state();
        const Rhs rhs = [&](double t, const Vec& y) {
            return Vec(wave.field().jacobian(wave.state(t)) * y + b * y -
                       b * (hm * past(t - theta)));
        };
        run.segments.push_back(integrate(rhs, y0, t0, t1, step_opts));
    }
    return run;
}

DiscretizedOperator linearized_step_operator(const DiscreteWave& wave, double b, int m,
                                             const OdeOptions& opts) {
    if (m < 8) throw Error(ErrorCode::invalid_argument, "operator grid needs m >= 8");
    const int dim = wave.field().dim();
    const double theta = wave.theta_h();
    const double dt = theta / m;
    const Mat h_inv = wave.sym().h.matrix.inverse();

    DiscretizedOperator op;
    op.m = m;
    op.dim = dim;
    op.assembly_tol = opts.rtol;
    op.matrix = Mat::Zero((m + 1) * dim, (m + 1) * dim);

    std::vector<Vec> nodes(m + 1, Vec::Zero(dim));
    for (int k = 0; k <= m; ++k) {
        // intervals of [-theta, 0] where the basis hat of node k is active
        // (its value, or any slope whose stencil contains it)
        std::vector<bool> forced(m, false);
        const auto touch = [&](int l) {
            if (l >= 1 && l <= m) forced[l - 1] = true;
            if (l >= 0 && l <= m - 1) forced[l] = true;
        };
        touch(k);
        for (int l = 0; l <= m; ++l) {
            bool in_stencil;
            if (l >= 2 && l <= m - 2)
                in_stencil = std::abs(l - k) <= 2;
            else if (l <= 1)
                in_stencil = k <= 4;
            else
                in_stencil = k >= m - 4;
            if (in_stencil) touch(l);
        }

        for (int i = 0; i < dim; ++i) {
            const int col = k * dim + i;
            nodes[k][i] = 1.0;
            const HistorySegment seg(theta, nodes);
            nodes[k][i] = 0.0;

            const Rhs rhs = [&](double t, const Vec& y) {
                return Vec(wave.field().jacobian(wave.state(t)) * y + b * y -
                           b * (wave.sym().h.matrix * seg.eval(t - theta)));
            };

            Vec y = seg.eval(0.0);
            op.matrix.block(0, col, dim, 1) = h_inv * y;
            bool moving = y.norm() > 0.0;
            for (int j = 0; j < m; ++j) {
                if (!moving && forced[j]) moving = true;
                if (moving) {
                    y = integrate(rhs, y, j * dt, (j + 1) * dt, opts).final_state();
                    op.matrix.block((j + 1) * dim, col, dim, 1) = h_inv * y;
                }
            }
        }
    }
    return op;
}

CVec oracle_spectrum(const DiscretizedOperator& op, int k) {
    if (k < 1 || k > op.matrix.rows())
        throw Error(ErrorCode::invalid_argument, "bad eigenvalue count");
    const CVec all = eigen_all(op.matrix);
    std::vector<Complex> sorted(all.data(), all.data() + all.size());
    std::sort(sorted.begin(), sorted.end(),
              [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
    CVec top(k);
    for (int i = 0; i < k; ++i) top[i] = sorted[i];
    return top;
}

double distance_to_orbit(const Vec& x, const DiscreteWave& wave) {
    const double p = wave.period();
    const int grid = 1024;
    double best_t = 0.0, best_d2 = 1e300;
    for (int i = 0; i < grid; ++i) {
        const double t = p * i / grid;
        const double d2 = (x - wave.state(t)).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best_t = t;
        }
    }
    // parabolic refinement of the squared distance
    double dt = p / grid;
    for (int round = 0; round < 3; ++round) {
        const double dm = (x - wave.state(best_t - dt)).squaredNorm();
        const double dp = (x - wave.state(best_t + dt)).squaredNorm();
        const double denom = dp - 2.0 * best_d2 + dm;
        if (std::abs(denom) < 1e-300) break;
        const double shift = 0.5 * dt * (dm - dp) / denom;
        const double t_new = best_t + std::clamp(shift, -dt, dt);
        const double d_new = (x - wave.state(t_new)).squaredNorm();
        if (d_new < best_d2) {
            best_d2 = d_new;
            best_t = t_new;
        }
        dt *= 0.25;
    }
    return std::sqrt(best_d2);
}

}  // namespace discwave
