#include "discwave/hayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace discwave {

namespace {

constexpr double pi = std::numbers::pi;

// omega cot(omega), continued through omega -> 0 with the series 1 - w^2/3.
double omega_cot(double omega) {
    if (std::abs(omega) < 1e-4) return 1.0 - omega * omega / 3.0;
    return omega * std::cos(omega) / std::sin(omega);
}

// omega / sin(omega) with the omega -> 0 series.
double omega_over_sin(double omega) {
    if (std::abs(omega) < 1e-4) return 1.0 + omega * omega / 6.0;
    return omega / std::sin(omega);
}

// unique omega in (0, pi) with omega cot(omega) = alpha (strictly
// decreasing from 1 to -inf); requires alpha < 1
double solve_omega_cot(double alpha) {
    double lo = 1e-300, hi = pi - 1e-15;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (omega_cot(mid) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// unique omega in (0, pi) with omega cot(omega/2) = lambda (strictly
// decreasing from 2 to 0); requires 0 < lambda < 2
double solve_omega_half_cot(double lambda) {
    const auto value = [](double omega) {
        if (omega < 1e-4) return 2.0 - omega * omega / 6.0;
        return omega * std::cos(0.5 * omega) / std::sin(0.5 * omega);
    };
    double lo = 1e-300, hi = pi - 1e-15;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (value(mid) > lambda)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

RegionPoint curve_c(double omega, int branch) {
    const double lo = pi * branch, hi = pi * (branch + 1);
    if (!(omega > lo) || !(omega < hi)) {
        if (!(branch == 0 && omega == 0.0))
            throw Error(ErrorCode::invalid_argument, "omega outside the branch interval");
    }
    if (branch == 0 && omega < 1e-4) {
        // series limit point (1, -1)
        return {1.0 - omega * omega / 3.0, -(1.0 + omega * omega / 6.0)};
    }
    return {omega * std::cos(omega) / std::sin(omega), -omega / std::sin(omega)};
}

RegionClass in_stability_region(const RegionPoint& p, double bnd_tol) {
    const double s = p.alpha + p.beta;
    if (s > bnd_tol) return RegionClass::exterior;
    if (p.alpha >= 1.0) {
        // the boundary curve and the line meet at (1, -1)
        if (std::abs(s) <= bnd_tol && std::abs(p.alpha - 1.0) <= bnd_tol)
            return RegionClass::on_c;
        return RegionClass::exterior;
    }
    if (std::abs(s) <= bnd_tol) return RegionClass::on_r;
    const double omega = solve_omega_cot(p.alpha);
    const double beta_c = -omega_over_sin(omega);
    if (p.beta > beta_c + bnd_tol) return RegionClass::interior;
    if (p.beta >= beta_c - bnd_tol) return RegionClass::on_c;
    return RegionClass::exterior;
}

GainInterval gain_interval_single(double mu_star, double theta_h) {
    GainInterval gi;
    gi.binding_mu = mu_star;
    PerEigInterval pe;
    pe.mu = mu_star;
    const double e2 = std::exp(2.0);
    if (!(mu_star > -e2) || !(mu_star < -1.0)) {
        pe.reason = (mu_star <= -e2) ? "window boundary: mu <= -e^2"
                                     : "window boundary: mu >= -1";
        gi.reason = pe.reason;
        gi.per_eig.push_back(pe);
        return gi;
    }
    const double lambda = std::log(-mu_star);  // in (0, 2)
    const double b_hi_star = -0.5 * lambda;
    const double omega = solve_omega_half_cot(lambda);
    const double b_lo_star = -omega_over_sin(omega);
    pe.b_lo = b_lo_star / theta_h;
    pe.b_hi = b_hi_star / theta_h;
    pe.empty = false;
    gi.b_lo = pe.b_lo;
    gi.b_hi = pe.b_hi;
    gi.empty = false;
    gi.per_eig.push_back(pe);
    return gi;
}

GainInterval gain_interval_combined(const TwistedMonodromy& tm, double theta_h,
                                    const HypothesisTols& tols, double gain_cap) {
    GainInterval gi;
    const HypothesisReport report = check_hypotheses(tm, tols);
    if (!report.pass()) {
        gi.reason = "hypotheses unsatisfied: " + report.diagnosis;
        return gi;
    }
    if (report.unstable.empty()) {
        // everything already inside the unit circle: any b < 0 works
        gi.b_lo = -gain_cap;
        gi.b_hi = 0.0;
        gi.empty = false;
        gi.unbounded_below = true;
        gi.reason = "no unstable eigenvalue; interval truncated at the gain cap";
        return gi;
    }
    double most_negative = 0.0;
    for (const Complex mu : report.unstable) {
        gi.per_eig.push_back(gain_interval_single(mu.real(), theta_h).per_eig.front());
        most_negative = std::min(most_negative, mu.real());
    }
    const GainInterval binding = gain_interval_single(most_negative, theta_h);
    gi.b_lo = binding.b_lo;
    gi.b_hi = binding.b_hi;
    gi.empty = binding.empty;
    gi.binding_mu = most_negative;
    gi.reason = binding.reason;
    return gi;
}

void emit_region_chart(std::ostream& out, const RegionChartOptions& opts) {
    out << "curve_id,omega,alpha,beta\n";
    for (int i = 0; i <= opts.samples_per_curve; ++i) {
        const double alpha = opts.r_alpha_min + (opts.r_alpha_max - opts.r_alpha_min) * i /
                                                    static_cast<double>(opts.samples_per_curve);
        out << "R,," << alpha << "," << -alpha << "\n";
    }
    for (int branch = 0; branch <= opts.higher_branches; ++branch) {
        const double lo = pi * branch, hi = pi * (branch + 1);
        const double margin = (branch == 0) ? 1e-6 : 1e-3;
        for (int i = 0; i <= opts.samples_per_curve; ++i) {
            const double omega =
                lo + margin + (hi - lo - 2.0 * margin) * i /
                                  static_cast<double>(opts.samples_per_curve);
            const RegionPoint p = curve_c(omega, branch);
            out << "C" << branch << "," << omega << "," << p.alpha << "," << p.beta << "\n";
        }
    }
}

void emit_gain_path(std::ostream& out, double lambda_star, double theta_h, int samples) {
    out << "b,bstar,alpha,beta,crossing\n";
    const double b_hi_star = -0.5 * lambda_star;
    const double omega = solve_omega_half_cot(lambda_star);
    const double b_lo_star = -omega_over_sin(omega);
    const double lo = 1.25 * b_lo_star, hi = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double bstar = lo + (hi - lo) * i / static_cast<double>(samples);
        out << bstar / theta_h << "," << bstar << "," << lambda_star + bstar << "," << bstar
            << ",\n";
    }
    out << b_hi_star / theta_h << "," << b_hi_star << "," << lambda_star + b_hi_star << ","
        << b_hi_star << ",line\n";
    out << b_lo_star / theta_h << "," << b_lo_star << "," << lambda_star + b_lo_star << ","
        << b_lo_star << ",curve\n";
}

}  // namespace discwave
