#include "discwave/flow.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace discwave {

DiscreteWave::DiscreteWave(VectorField field, SpatioTemporalSymmetry sym, Vec anchor,
                           Trajectory traj, double shooting_residual, OdeOptions ode)
    : field_(std::move(field)),
      sym_(std::move(sym)),
      anchor_(std::move(anchor)),
      traj_(std::move(traj)),
      shooting_residual_(shooting_residual),
      ode_(ode) {}

Vec DiscreteWave::state(double t) const {
    const double p = sym_.period;
    double s = std::fmod(t, p);
    if (s < 0.0) s += p;
    return traj_.eval(s);
}

Vec DiscreteWave::tangent(double t) const { return field_(state(t)); }

namespace {

// State + variational matrix integrated together (dimension n + n^2,
// matrix flattened column-major).
struct FlowWithVariational {
    Vec phi;
    Mat y;
};

FlowWithVariational integrate_with_variational(const VectorField& f, const Vec& x0, double t,
                                               const OdeOptions& opts) {
    const int n = f.dim();
    Vec z0(n + n * n);
    z0.head(n) = x0;
    z0.tail(n * n) = Mat::Identity(n, n).reshaped();
    const Rhs rhs = [&f, n](double, const Vec& z) {
        Vec out(n + n * n);
        const Vec x = z.head(n);
        const Mat y = z.tail(n * n).reshaped(n, n);
        out.head(n) = f(x);
        out.tail(n * n) = (f.jacobian(x) * y).reshaped();
        return out;
    };
    const Trajectory traj = integrate(rhs, z0, 0.0, t, opts);
    FlowWithVariational result;
    result.phi = traj.final_state().head(n);
    result.y = traj.final_state().tail(n * n).reshaped(n, n);
    return result;
}

Mat variational_along(const VectorField& f, const std::function<Vec(double)>& path, double t_from,
                      double t_to, const OdeOptions& opts) {
    const int n = f.dim();
    const Vec y0 = Mat::Identity(n, n).reshaped();
    const Rhs rhs = [&f, &path, n](double t, const Vec& y) {
        return Vec((f.jacobian(path(t)) * y.reshaped(n, n)).reshaped());
    };
    return integrate(rhs, y0, t_from, t_to, opts).final_state().reshaped(n, n);
}

}  // namespace

Mat fundamental_solution(const VectorField& f, const Trajectory& path, double t_from, double t_to,
                         const OdeOptions& opts) {
    return variational_along(
        f, [&path](double t) { return path.eval(t); }, t_from, t_to, opts);
}

Mat fundamental_solution(const DiscreteWave& wave, double t_from, double t_to,
                         const OdeOptions& opts) {
    return variational_along(
        wave.field(), [&wave](double t) { return wave.state(t); }, t_from, t_to, opts);
}

DiscreteWave find_discrete_wave(const VectorField& f, const GroupElement& h, int n, int m,
                                double theta_guess, const Vec& x_guess,
                                const ShootingOptions& opts) {
    const int dim = f.dim();
    if (x_guess.size() != dim)
        throw Error(ErrorCode::invalid_argument, "guess dimension mismatch");
    if (h.matrix.rows() != dim || h.matrix.cols() != dim)
        throw Error(ErrorCode::invalid_argument, "group element dimension mismatch");
    if (!(theta_guess > 0.0))
        throw Error(ErrorCode::invalid_argument, "theta guess must be positive");
    if (!check_orthogonal(h, 1e-10))
        throw Error(ErrorCode::invalid_argument, "group element is not orthogonal");
    if (n < 1 || m < 1 || m > n)
        throw Error(ErrorCode::invalid_argument, "pattern integers must satisfy 1 <= m <= n");

    const Mat h_inv = h.matrix.inverse();
    const Vec phase_dir = f(x_guess);
    if (phase_dir.norm() < 1e-14)
        throw Error(ErrorCode::invalid_argument, "guess is an equilibrium, no phase direction");

    Vec x0 = x_guess;
    double t_shoot = theta_guess;
    double residual = 0.0;

    for (int iter = 0;; ++iter) {
        const FlowWithVariational fv = integrate_with_variational(f, x0, t_shoot, opts.ode);
        const Vec g1 = h_inv * fv.phi - x0;
        const double g2 = phase_dir.dot(x0 - x_guess);
        residual = std::sqrt(g1.squaredNorm() + g2 * g2);
        if (residual <= opts.tol) break;
        if (iter >= opts.max_iter) {
            std::ostringstream msg;
            msg << "twisted shooting did not converge after " << iter
                << " iterations, residual " << residual;
            throw Error(ErrorCode::no_convergence, msg.str());
        }

        Mat jac(dim + 1, dim + 1);
        jac.topLeftCorner(dim, dim) = h_inv * fv.y - Mat::Identity(dim, dim);
        jac.topRightCorner(dim, 1) = h_inv * f(fv.phi);
        jac.bottomLeftCorner(1, dim) = phase_dir.transpose();
        jac(dim, dim) = 0.0;

        Vec rhs(dim + 1);
        rhs.head(dim) = -g1;
        rhs[dim] = -g2;

        const Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double sv_max = svd.singularValues()(0);
        const double sv_min = svd.singularValues()(dim);
        if (sv_min <= 1e-14 * sv_max) {
            std::ostringstream msg;
            msg << "shooting system singular, condition estimate " << sv_max / sv_min;
            throw Error(ErrorCode::no_convergence, msg.str());
        }
        const Vec delta = svd.solve(rhs);
        x0 += delta.head(dim);
        t_shoot += delta[dim];
        if (!(t_shoot > 0.0))
            throw Error(ErrorCode::no_convergence, "shooting period collapsed to zero");
    }

    const double period = static_cast<double>(n) * t_shoot / static_cast<double>(m);
    SpatioTemporalSymmetry sym;
    sym.h = h;
    sym.theta_h = t_shoot;
    sym.n = n;
    sym.m = m;
    sym.period = period;
    sym.validate();

    Trajectory traj = integrate(f, x0, 0.0, period, opts.ode);
    DiscreteWave wave(f, sym, x0, std::move(traj), residual, opts.ode);

    std::vector<std::pair<int, double>> probe;
    for (int k = 2; k <= 6; ++k) {
        const double closure = (wave.trajectory().eval(period / k) - x0).norm();
        probe.emplace_back(k, closure);
    }
    wave.set_minimality_probe(std::move(probe));
    return wave;
}

}  // namespace discwave
