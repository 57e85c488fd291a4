#include "discwave/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace discwave {

CVec eigen_all(const Mat& a, double* backward_error) {
    if (a.rows() != a.cols() || a.rows() < 1)
        throw Error(ErrorCode::invalid_argument, "eigenvalue input must be square");
    Eigen::EigenSolver<Mat> solver(a, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::no_convergence, "dense eigensolver did not converge");
    const CVec eigs = solver.eigenvalues();
    if (backward_error) {
        const CMat vectors = solver.eigenvectors();
        const double scale = std::max(a.norm(), 1e-300);
        double worst = 0.0;
        for (Eigen::Index j = 0; j < eigs.size(); ++j) {
            const CVec v = vectors.col(j);
            const double res = (a.cast<Complex>() * v - eigs[j] * v).norm() / v.norm();
            worst = std::max(worst, res / scale);
        }
        *backward_error = worst;
    }
    return eigs;
}

TwistedMonodromy twisted_monodromy(const DiscreteWave& wave, const OdeOptions& opts) {
    TwistedMonodromy tm;
    tm.y_theta = fundamental_solution(wave, 0.0, wave.theta_h(), opts);
    tm.y_h = wave.sym().h.matrix.inverse() * tm.y_theta;
    tm.spectrum = eigen_all(tm.y_h, &tm.backward_error);

    int best = 0;
    for (int j = 1; j < tm.spectrum.size(); ++j)
        if (std::abs(tm.spectrum[j] - 1.0) < std::abs(tm.spectrum[best] - 1.0)) best = j;
    tm.trivial_index = best;
    return tm;
}

HypothesisReport check_hypotheses(const TwistedMonodromy& tm, const HypothesisTols& tols) {
    HypothesisReport report;
    std::ostringstream diag;
    const double e2 = std::exp(2.0);

    int near_one = 0;
    double second_sep = 1e300;
    for (int j = 0; j < tm.spectrum.size(); ++j) {
        const double dist = std::abs(tm.spectrum[j] - 1.0);
        if (dist <= tols.eig_tol)
            ++near_one;
        else
            second_sep = std::min(second_sep, dist);
    }
    report.trivial_simple = (near_one == 1) && (second_sep > tols.sep_floor);
    if (near_one != 1) diag << "eigenvalues within eig_tol of 1: " << near_one << "; ";
    else if (second_sep <= tols.sep_floor)
        diag << "second eigenvalue only " << second_sep << " away from 1; ";

    report.unit_circle_clear = true;
    report.all_in_window = true;
    report.margin = 1e300;
    for (int j = 0; j < tm.spectrum.size(); ++j) {
        if (j == tm.trivial_index) continue;
        const Complex mu = tm.spectrum[j];
        const double mod = std::abs(mu);
        if (std::abs(mod - 1.0) <= tols.eig_tol) {
            report.unit_circle_clear = false;
            diag << "nontrivial eigenvalue on the unit circle: " << mu.real() << "+"
                 << mu.imag() << "i; ";
        }
        if (mod > 1.0 + tols.eig_tol) {
            report.unstable.push_back(mu);
            const bool real_enough = std::abs(mu.imag()) <= tols.im_tol * std::max(1.0, mod);
            const bool in_window = real_enough && (mu.real() > -e2 + tols.margin_floor) &&
                                   (mu.real() < -1.0 - tols.margin_floor);
            if (!in_window) {
                report.all_in_window = false;
                if (!real_enough)
                    diag << "unstable eigenvalue is complex; ";
                else
                    diag << "unstable eigenvalue " << mu.real() << " outside (-e^2, -1); ";
            }
            if (real_enough) {
                const double margin =
                    std::min(std::abs(mu.real() + e2), std::abs(mu.real() + 1.0));
                report.margin = std::min(report.margin, margin);
                if (margin < 1e-3) diag << "eigenvalue near the window boundary; ";
            }
        }
    }
    if (report.unstable.empty()) report.margin = 0.0;
    report.diagnosis = diag.str();
    if (report.diagnosis.size() >= 2) report.diagnosis.erase(report.diagnosis.size() - 2);
    return report;
}

double verify_power_identity(const DiscreteWave& wave, const TwistedMonodromy& tm,
                             const OdeOptions& opts) {
    const int dim = wave.field().dim();
    const int n = wave.sym().n;
    const int m = wave.sym().m;
    const Mat y_p = fundamental_solution(wave, 0.0, wave.period(), opts);

    Mat lhs = Mat::Identity(dim, dim);
    for (int j = 0; j < m; ++j) lhs = y_p * lhs;

    Mat h_n = Mat::Identity(dim, dim);
    for (int j = 0; j < n; ++j) h_n = wave.sym().h.matrix * h_n;
    Mat rhs = Mat::Identity(dim, dim);
    for (int j = 0; j < n; ++j) rhs = tm.y_h * rhs;
    rhs = h_n * rhs;

    return (lhs - rhs).norm() / std::max(lhs.norm(), 1e-300);
}

double liouville_residual(const DiscreteWave& wave, const TwistedMonodromy& tm,
                          const OdeOptions& opts) {
    const Rhs rhs = [&wave](double t, const Vec&) {
        Vec out(1);
        out[0] = wave.field().jacobian(wave.state(t)).trace();
        return out;
    };
    Vec z0(1);
    z0[0] = 0.0;
    const double trace_integral =
        integrate(rhs, z0, 0.0, wave.theta_h(), opts).final_state()[0];
    const double expected =
        wave.sym().h.matrix.inverse().determinant() * std::exp(trace_integral);
    const double actual = tm.y_h.determinant();
    return std::abs(actual - expected) / std::max(std::abs(expected), 1e-300);
}

}  // namespace discwave
