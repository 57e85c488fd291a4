#include "discwave/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>

#include "discwave/lambert.hpp"

namespace discwave {

namespace {

constexpr double pi = std::numbers::pi;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double wrap_angle(double a) {
    while (a > pi) a -= 2.0 * pi;
    while (a <= -pi) a += 2.0 * pi;
    return a;
}

// One factor 1 - mu z e^{b*(1-z)}.
struct Factor {
    Complex mu;
    double bstar = 0.0;
};

// log(mu z e^{b*(1-z)}), the overflow-free representation of the factor's
// exponential part.
Complex factor_log_a(const Factor& f, Complex z) {
    return std::log(f.mu * z) + f.bstar * (1.0 - z);
}

Complex factor_value(const Factor& f, Complex z) {
    if (z == 0.0) return 1.0;
    const Complex log_a = factor_log_a(f, z);
    if (log_a.real() > 690.0) return -std::exp(log_a);
    return 1.0 - std::exp(log_a);
}

// Im(log factor), stable for any magnitude; offsets by multiples of 2 pi
// are irrelevant to the winding accumulation.
double factor_arg(const Factor& f, Complex z) {
    if (z == 0.0) return 0.0;
    const Complex log_a = factor_log_a(f, z);
    if (log_a.real() > 40.0) {
        // f = -A (1 - 1/A)
        return log_a.imag() + pi + std::arg(1.0 - std::exp(-log_a));
    }
    return std::arg(1.0 - std::exp(log_a));
}

// Newton step f/f' = (z - q)/(1 - b* z) with q = e^{-b*(1-z)}/mu; free of
// exponential overflow near roots.
std::optional<Complex> factor_newton(const Factor& f, Complex z, const RootOptions& opts) {
    if (std::abs(f.mu) == 0.0) return std::nullopt;
    for (int iter = 0; iter < opts.newton_max_iter; ++iter) {
        const Complex w = f.bstar * (1.0 - z);
        if (-w.real() > 690.0) return std::nullopt;  // factor ~ 1, no root near
        const Complex q = std::exp(-w) / f.mu;
        const Complex denom = 1.0 - f.bstar * z;
        if (std::abs(denom) < 1e-290) break;
        const Complex step = (z - q) / denom;
        if (!finite(step)) return std::nullopt;
        z -= step;
        if (!finite(z)) return std::nullopt;
        if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z))) break;
    }
    const Complex value = factor_value(f, z);
    const double scale = std::max(1.0, std::abs(value - 1.0));
    if (!finite(z) || std::abs(value) > opts.root_tol * scale * 1e3) return std::nullopt;
    return z;
}

// Adaptive winding number of a closed curve point(t), t in [0,1], from the
// argument samples of the function along it: panels are the exact integrals
// of f'/f via principal-branch log differences, bisected until each panel
// turns by less than pi/2.
struct ContourIllPosed {
    std::string what;
};

long winding_closed(const std::function<Complex(double)>& point,
                    const std::function<double(Complex)>& arg_at, int init_panels) {
    init_panels = std::max(init_panels, 16);
    double total = 0.0;
    std::function<double(double, double, double, double, int)> segment =
        [&](double ta, double tb, double arg_a, double arg_b, int depth) -> double {
        const double d = wrap_angle(arg_b - arg_a);
        if (std::abs(d) <= 0.5 * pi) return d;
        if (depth > 48) throw ContourIllPosed{"phase tracking exhausted (root on contour?)"};
        const double tm = 0.5 * (ta + tb);
        const double arg_m = arg_at(point(tm));
        if (!std::isfinite(arg_m)) throw ContourIllPosed{"function vanished on contour"};
        return segment(ta, tm, arg_a, arg_m, depth + 1) +
               segment(tm, tb, arg_m, arg_b, depth + 1);
    };
    std::vector<double> args(init_panels + 1);
    for (int i = 0; i <= init_panels; ++i) {
        const double t = static_cast<double>(i) / init_panels;
        args[i] = arg_at(point(t));
        if (!std::isfinite(args[i])) throw ContourIllPosed{"function vanished on contour"};
    }
    for (int i = 0; i < init_panels; ++i) {
        const double ta = static_cast<double>(i) / init_panels;
        const double tb = static_cast<double>(i + 1) / init_panels;
        total += segment(ta, tb, args[i], args[i + 1], 0);
    }
    const double w = total / (2.0 * pi);
    const double rounded = std::round(w);
    if (std::abs(w - rounded) > 0.05)
        throw ContourIllPosed{"winding integral did not settle on an integer"};
    return static_cast<long>(rounded);
}

long winding_on_circle(const std::function<double(Complex)>& arg_at, Complex center, double r,
                       int init_panels) {
    return winding_closed(
        [center, r](double t) {
            return center + r * std::exp(Complex(0.0, 2.0 * pi * t));
        },
        arg_at, init_panels);
}

struct LocatedRoot {
    Complex z;
    int multiplicity = 1;
    double residual = 0.0;
};

// Collapse nearby candidates and measure each cluster's multiplicity by a
// small-circle winding count.
std::vector<LocatedRoot> cluster_candidates(const Factor& f, std::vector<Complex> candidates,
                                            const RootOptions& opts) {
    std::vector<LocatedRoot> clusters;
    std::sort(candidates.begin(), candidates.end(),
              [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
    for (const Complex z : candidates) {
        bool merged = false;
        for (const auto& c : clusters) {
            if (std::abs(z - c.z) <= opts.cluster_tol * std::max(1.0, std::abs(c.z))) {
                merged = true;
                break;
            }
        }
        if (!merged) clusters.push_back({z, 1, std::abs(factor_value(f, z))});
    }
    for (auto& c : clusters) {
        double r = 1e-6 * (1.0 + std::abs(c.z));
        for (const auto& other : clusters) {
            if (&other == &c) continue;
            r = std::min(r, 0.4 * std::abs(other.z - c.z));
        }
        const auto arg_at = [&f](Complex z) { return factor_arg(f, z); };
        try {
            c.multiplicity =
                static_cast<int>(winding_on_circle(arg_at, c.z, r, 32));
        } catch (const ContourIllPosed&) {
            c.multiplicity = 1;
        }
    }
    std::erase_if(clusters, [](const LocatedRoot& c) { return c.multiplicity < 1; });
    return clusters;
}

// All roots of one factor inside |z| < radius: homotopy from the control-off
// root, exponential branch enumeration, and a polar grid, all polished by
// Newton and audited later against the whole-disk winding count.
std::vector<LocatedRoot> factor_roots(const Factor& f, double radius, const RootOptions& opts) {
    std::vector<Complex> candidates;
    if (std::abs(f.mu) == 0.0) return {};
    const Complex z_off = 1.0 / f.mu;

    if (std::abs(f.bstar) < 1e-13) {
        candidates.push_back(z_off);
    } else {
        // continuation in the gain from the control-off root
        Complex z = z_off;
        bool alive = true;
        for (int s = 1; s <= opts.homotopy_steps && alive; ++s) {
            Factor fs{f.mu, f.bstar * static_cast<double>(s) / opts.homotopy_steps};
            const auto polished = factor_newton(fs, z, opts);
            if (polished)
                z = *polished;
            else
                alive = false;
        }
        if (alive) candidates.push_back(z);

        // z = e^{-lambda}, lambda = alpha + W_k(beta e^{-alpha})
        const Complex alpha = std::log(f.mu) + f.bstar;
        const Complex beta = Complex(-f.bstar, 0.0);
        const Complex log_zeta = std::log(beta) - alpha;
        const bool zeta_representable = std::abs(log_zeta.real()) < 600.0;
        const Complex zeta = zeta_representable ? std::exp(log_zeta) : Complex(0.0);
        // branches fill the disk at a spacing of roughly 2 pi / |b*|
        const int k_cap =
            std::max(400, static_cast<int>(std::ceil(std::abs(f.bstar) * 3.0 * radius /
                                                     (2.0 * pi))) +
                              50);
        for (const int dir : {1, -1}) {
            int far_in_a_row = 0;
            for (int j = 0; j <= k_cap; ++j) {
                const int k = dir * j;
                if (dir == -1 && j == 0) continue;
                Complex z_seed;
                if (zeta_representable) {
                    Complex lam;
                    try {
                        lam = alpha + lambert_w(zeta, k);
                    } catch (const Error&) {
                        break;
                    }
                    z_seed = std::exp(-lam);
                } else {
                    // first-order ladder around z = 1, valid exactly in the
                    // large-|b*| regime where zeta is unrepresentable
                    z_seed = 1.0 - (Complex(0.0, -2.0 * pi * k) - std::log(f.mu)) /
                                       (f.bstar - 1.0);
                }
                if (!finite(z_seed)) continue;
                if (std::abs(z_seed) > 3.0 * radius) {
                    if (++far_in_a_row >= 4 && j >= 4) break;
                } else {
                    far_in_a_row = 0;
                    candidates.push_back(z_seed);
                }
            }
        }
    }

    for (int ir = 0; ir < 16; ++ir) {
        const double r = radius * std::pow(10.0, -3.0 + 3.0 * ir / 15.0);
        for (int ia = 0; ia < 24; ++ia)
            candidates.push_back(r * std::exp(Complex(0.0, 2.0 * pi * ia / 24.0)));
    }

    std::vector<Complex> polished;
    for (const Complex seed : candidates) {
        const auto root = factor_newton(f, seed, opts);
        if (root && std::abs(*root) < radius * (1.0 - 1e-9)) polished.push_back(*root);
    }
    return cluster_candidates(f, std::move(polished), opts);
}

std::vector<Factor> active_factors(const CharFunction& cf) {
    std::vector<Factor> factors;
    for (int j = 0; j < cf.mu.size(); ++j)
        if (std::abs(cf.mu[j]) > 0.0) factors.push_back({cf.mu[j], cf.bstar()});
    return factors;
}

double arg_of_d(const std::vector<Factor>& factors, Complex z) {
    double sum = 0.0;
    for (const auto& f : factors) sum += factor_arg(f, z);
    return sum;
}

}  // namespace

CharFunction CharFunction::from_monodromy(const TwistedMonodromy& tm, double b, double theta_h) {
    CharFunction cf;
    cf.mu = tm.spectrum;
    cf.b = b;
    cf.theta_h = theta_h;
    cf.y_h = tm.y_h;
    return cf;
}

CharFunction CharFunction::from_eigs(CVec mu, double b, double theta_h) {
    CharFunction cf;
    cf.mu = std::move(mu);
    cf.b = b;
    cf.theta_h = theta_h;
    return cf;
}

Complex eval_d(const CharFunction& cf, Complex z) {
    const Complex w = cf.bstar() * (1.0 - z);
    if (std::abs(w) <= 500.0) {
        const Complex ew = std::exp(w);
        Complex prod = 1.0;
        for (int j = 0; j < cf.mu.size(); ++j) prod *= 1.0 - cf.mu[j] * z * ew;
        return prod;
    }
    // log-sum form: factors may overflow individually even when the
    // product is representable
    Complex log_sum = 0.0;
    for (int j = 0; j < cf.mu.size(); ++j) {
        if (std::abs(cf.mu[j]) == 0.0 || z == 0.0) continue;
        const Complex log_a = std::log(cf.mu[j] * z) + w;
        if (log_a.real() > 40.0)
            log_sum += log_a + Complex(0.0, pi) + std::log(1.0 - std::exp(-log_a));
        else
            log_sum += std::log(1.0 - std::exp(log_a));
    }
    return std::exp(log_sum);
}

Complex eval_d_prime(const CharFunction& cf, Complex z) {
    const Complex w = cf.bstar() * (1.0 - z);
    if (std::abs(w) <= 500.0) {
        const Complex ew = std::exp(w);
        const auto n = cf.mu.size();
        Complex sum = 0.0;
        for (int j = 0; j < n; ++j) {
            Complex term = -cf.mu[j] * ew * (1.0 - cf.bstar() * z);
            for (int k = 0; k < n; ++k)
                if (k != j) term *= 1.0 - cf.mu[k] * z * ew;
            sum += term;
        }
        return sum;
    }
    return eval_d(cf, z) * log_derivative(cf, z);
}

Complex log_derivative(const CharFunction& cf, Complex z) {
    const Complex w = cf.bstar() * (1.0 - z);
    Complex sum = 0.0;
    for (int j = 0; j < cf.mu.size(); ++j) {
        if (std::abs(cf.mu[j]) == 0.0) continue;
        if (-w.real() > 690.0) continue;  // factor ~ 1, derivative ratio ~ 0
        const Complex q = std::exp(-w) / cf.mu[j];
        sum += (1.0 - cf.bstar() * z) / (z - q);
    }
    return sum;
}

CMat eval_delta(const CharFunction& cf, Complex z) {
    if (cf.y_h.size() == 0)
        throw Error(ErrorCode::invalid_argument, "matrix form unavailable, only eigenvalues");
    const auto n = cf.y_h.rows();
    const Complex ew = std::exp(cf.bstar() * (1.0 - z));
    return CMat::Identity(n, n) - z * ew * cf.y_h.cast<Complex>();
}

SimplicityAtOne simplicity_at_one(const CharFunction& cf, double tol) {
    SimplicityAtOne result;
    const Complex d1 = eval_d(cf, 1.0);
    result.d_abs = std::abs(d1);
    result.is_root = result.d_abs <= tol;
    result.d_prime = eval_d_prime(cf, 1.0);
    return result;
}

int RootSet::total_multiplicity() const {
    int total = 0;
    for (const int m : multiplicity) total += m;
    return total;
}

RootSet roots_in_disk(const CharFunction& cf, double radius, const RootOptions& opts) {
    if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "search radius must be > 0");
    const std::vector<Factor> factors = active_factors(cf);

    std::string last_issue = "no attempt";
    double r = radius;
    for (int attempt = 0; attempt <= opts.max_nudges; ++attempt) {
        // candidate roots, unioned over factors (coincident roots add up)
        std::vector<LocatedRoot> merged;
        for (const auto& f : factors) {
            for (const auto& root : factor_roots(f, r, opts)) {
                bool found = false;
                for (auto& existing : merged) {
                    if (std::abs(existing.z - root.z) <=
                        opts.cluster_tol * std::max(1.0, std::abs(existing.z))) {
                        existing.multiplicity += root.multiplicity;
                        found = true;
                        break;
                    }
                }
                if (!found) merged.push_back(root);
            }
        }
        int found_count = 0;
        for (const auto& root : merged) found_count += root.multiplicity;

        const int panels =
            64 + 8 * static_cast<int>(factors.size()) *
                     (2 + static_cast<int>(std::abs(cf.bstar()) * r));
        try {
            const auto arg_at = [&factors](Complex z) { return arg_of_d(factors, z); };
            const long w = winding_on_circle(arg_at, 0.0, r, panels);
            if (w == found_count) {
                RootSet rs;
                rs.radius = r;
                rs.winding = w;
                std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) {
                    return std::abs(a.z) < std::abs(b.z);
                });
                for (const auto& root : merged) {
                    rs.roots.push_back(root.z);
                    rs.multiplicity.push_back(root.multiplicity);
                    rs.residuals.push_back(std::abs(eval_d(cf, root.z)));
                }
                return rs;
            }
            std::ostringstream msg;
            msg << "winding count " << w << " vs " << found_count << " located roots at radius "
                << r;
            last_issue = msg.str();
        } catch (const ContourIllPosed& bad) {
            last_issue = bad.what;
        }
        // nudge the contour off whatever it hit: +1%, -1%, +2%, -2%, ...
        const double sign = (attempt % 2 == 0) ? 1.0 : -1.0;
        r = radius * (1.0 + sign * 0.01 * (1 + attempt / 2));
    }
    throw Error(ErrorCode::verification, "root search audit failed: " + last_issue);
}

std::vector<Complex> smallest_roots(const CharFunction& cf, int k, double radius_cap,
                                    const RootOptions& opts) {
    double radius = 2.0;
    while (true) {
        const RootSet rs = roots_in_disk(cf, radius, opts);
        if (rs.total_multiplicity() >= k || radius >= radius_cap) {
            std::vector<Complex> flat;
            for (std::size_t i = 0; i < rs.roots.size(); ++i)
                for (int c = 0; c < rs.multiplicity[i]; ++c) flat.push_back(rs.roots[i]);
            if (static_cast<int>(flat.size()) > k) flat.resize(k);
            return flat;
        }
        radius *= 2.0;
    }
}

DiskVerdict unit_disk_verdict(const CharFunction& cf, double margin, const RootOptions& opts) {
    const RootSet rs = roots_in_disk(cf, 1.0 + margin, opts);
    DiskVerdict verdict;
    verdict.roots_on_or_inside = rs.total_multiplicity();
    for (std::size_t i = 0; i < rs.roots.size(); ++i) {
        if (std::abs(rs.roots[i] - 1.0) <= 1e-6) {
            verdict.unit_root_present = true;
            verdict.unit_root_simple = (rs.multiplicity[i] == 1);
        } else {
            for (int c = 0; c < rs.multiplicity[i]; ++c) verdict.offending.push_back(rs.roots[i]);
        }
    }
    verdict.stable =
        verdict.unit_root_present && verdict.unit_root_simple && verdict.offending.empty();
    return verdict;
}

ExpCorrespondence exp_correspondence(Complex alpha, Complex beta, double im_window,
                                     const RootOptions& opts) {
    if (!(im_window > 0.0)) throw Error(ErrorCode::invalid_argument, "strip height must be > 0");
    ExpCorrespondence out;
    const auto g_value = [alpha, beta](Complex z) { return -z + alpha + beta * std::exp(-z); };

    if (std::abs(beta) < 1e-300) {
        if (std::abs(alpha.imag()) <= im_window) {
            out.lambdas.push_back(alpha);
            out.multiplicity.push_back(1);
            out.zs.push_back(std::exp(-alpha));
            out.strip_count = 1;
        }
        return out;
    }

    // every root is alpha + W_k(beta e^{-alpha}); enumerate the branches
    // whose imaginary parts can reach the strip
    const Complex zeta = beta * std::exp(-alpha);
    const int k_max =
        static_cast<int>(std::ceil((im_window + std::abs(alpha.imag())) / (2.0 * pi))) + 3;
    std::vector<Complex> candidates;
    for (int k = -k_max; k <= k_max; ++k) {
        Complex lam;
        try {
            lam = alpha + lambert_w(zeta, k);
        } catch (const Error&) {
            continue;
        }
        // Newton polish on G itself
        for (int iter = 0; iter < opts.newton_max_iter; ++iter) {
            const Complex g = g_value(lam);
            const Complex gp = -1.0 - beta * std::exp(-lam);
            if (std::abs(gp) < 1e-290) break;
            const Complex step = g / gp;
            lam -= step;
            if (!finite(lam)) break;
            if (std::abs(step) <= 1e-14 * (1.0 + std::abs(lam))) break;
        }
        if (!finite(lam)) continue;
        if (std::abs(g_value(lam)) > 1e-8 * (1.0 + std::abs(lam))) continue;
        candidates.push_back(lam);
    }

    // dedup plus local multiplicity (branch-point double roots collapse)
    std::vector<LocatedRoot> all_clusters;
    for (const Complex lam : candidates) {
        bool merged = false;
        for (const auto& c : all_clusters)
            if (std::abs(lam - c.z) <= opts.cluster_tol * std::max(1.0, std::abs(c.z))) {
                merged = true;
                break;
            }
        if (!merged) all_clusters.push_back({lam, 1, 0.0});
    }
    const auto arg_g = [&g_value](Complex z) { return std::arg(g_value(z)); };
    for (auto& c : all_clusters) {
        double r = 1e-6 * (1.0 + std::abs(c.z));
        for (const auto& other : all_clusters) {
            if (&other == &c) continue;
            r = std::min(r, 0.4 * std::abs(other.z - c.z));
        }
        try {
            c.multiplicity = static_cast<int>(winding_on_circle(arg_g, c.z, r, 32));
        } catch (const ContourIllPosed&) {
            c.multiplicity = 1;
        }
        if (c.multiplicity < 1) c.multiplicity = 1;
    }

    // strip audit over a rectangle enclosing every possible root. Any root
    // satisfies Re lam <= Re alpha + |beta| e^{-Re lam}; the gap
    // x - Re alpha - |beta| e^{-x} is strictly increasing in x, so its
    // unique zero is a certified right bound (bisection, since the naive
    // fixed-point iteration diverges whenever |beta| e^{-x*} > 1).
    const double a_re = alpha.real();
    const double b_abs = std::abs(beta);
    const auto right_gap = [&](double x) { return x - a_re - b_abs * std::exp(-x); };
    double hi = a_re + std::max(1.0, b_abs);
    for (int it = 0; it < 2100 && !(right_gap(hi) > 0.0); ++it) hi = a_re + 2.0 * (hi - a_re);
    double lo = a_re;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (right_gap(mid) > 0.0 ? hi : lo) = mid;
    }
    double x_max = hi + 1.0;

    // On the left, |beta e^{-lam}| = |lam - alpha| pins every strip root;
    // walk down until the exponential dominates twice over, which both
    // bounds the roots and keeps the contour clear of zeros.
    const double band = im_window + std::abs(alpha.imag());
    double x_min = std::min(a_re, x_max - 1.0) - 1.0;
    for (int it = 0; it < 800; ++it) {
        if (b_abs * std::exp(-x_min) >= 2.0 * std::hypot(x_min - a_re, band)) break;
        x_min -= 1.0;
    }
    x_max = std::max(x_max, x_min + 1.0);

    double height = im_window;
    long strip_count = -1;
    std::vector<LocatedRoot> clusters;
    std::string issue;
    for (int attempt = 0; attempt <= opts.max_nudges; ++attempt) {
        clusters.clear();
        for (const auto& c : all_clusters)
            if (std::abs(c.z.imag()) <= height && c.z.real() >= x_min && c.z.real() <= x_max)
                clusters.push_back(c);

        const Complex c1(x_min, -height), c2(x_max, -height), c3(x_max, height), c4(x_min, height);
        const auto point = [&](double t) {
            const double s = 4.0 * t;
            if (s < 1.0) return c1 + s * (c2 - c1);
            if (s < 2.0) return c2 + (s - 1.0) * (c3 - c2);
            if (s < 3.0) return c3 + (s - 2.0) * (c4 - c3);
            return c4 + (s - 3.0) * (c1 - c4);
        };
        const int panels = 64 + 8 * static_cast<int>(std::abs(beta) * std::exp(-x_min) / pi +
                                                     (x_max - x_min) + height);
        try {
            strip_count = winding_closed(point, arg_g, panels);
            int found = 0;
            for (const auto& c : clusters) found += c.multiplicity;
            if (strip_count == found) break;
            std::ostringstream msg;
            msg << "strip root count mismatch: winding " << strip_count << ", located " << found;
            issue = msg.str();
            strip_count = -1;
        } catch (const ContourIllPosed& bad) {
            issue = bad.what;
        }
        // a root may sit on the strip edge; nudge the rectangle height
        height = im_window * (1.0 + 1e-6 * (attempt + 1));
    }
    if (strip_count < 0)
        throw Error(ErrorCode::verification, "strip audit failed: " + issue);
    out.strip_count = strip_count;

    std::sort(clusters.begin(), clusters.end(),
              [](const auto& a, const auto& b) { return a.z.imag() < b.z.imag(); });
    const auto f_value = [alpha, beta](Complex z) {
        return 1.0 - z * std::exp(alpha) * std::exp(beta * z);
    };
    for (const auto& c : clusters) {
        out.lambdas.push_back(c.z);
        out.multiplicity.push_back(c.multiplicity);
        const Complex z = std::exp(-c.z);
        out.zs.push_back(z);
        out.max_f_residual = std::max(out.max_f_residual, std::abs(f_value(z)));
    }
    return out;
}

}  // namespace discwave
