#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "discwave/charfn.hpp"
#include "discwave/lambert.hpp"

using namespace discwave;

namespace {

// Spectrum of the benchmark oscillator's twisted step, in closed form.
CVec oscillator_mu() {
    CVec mu(3);
    mu << Complex(std::exp(-2.0 * M_PI), 0.0), Complex(1.0, 0.0),
        Complex(-std::exp(M_PI / 2.0), 0.0);
    return mu;
}

constexpr double kTheta = M_PI;

bool has_root_near(const RootSet& rs, Complex target, double tol) {
    for (const Complex z : rs.roots)
        if (std::abs(z - target) <= tol) return true;
    return false;
}

}  // namespace

TEST_SUITE("charfn") {
    TEST_CASE("lambert_w satisfies w e^w = z across branches") {
        for (int k : {-2, -1, 0, 1, 3}) {
            for (Complex z : {Complex(0.5, 0.3), Complex(-2.0, 1.0), Complex(10.0, -4.0)}) {
                CAPTURE(k);
                const Complex w = lambert_w(z, k);
                CHECK(std::abs(w * std::exp(w) - z) < 1e-10 * std::max(1.0, std::abs(z)));
            }
        }
        // branch index is recovered from the imaginary part
        CHECK(std::abs(lambert_w(Complex(1.0, 0.0), 0) - 0.5671432904097838) < 1e-12);
        CHECK(lambert_w(Complex(0.5, 0.2), 1).imag() > M_PI);
        CHECK_THROWS_AS(lambert_w(Complex(0.0, 0.0), 1), Error);
    }

    TEST_CASE("d(0) = 1 and the control-off roots are reciprocal eigenvalues") {
        const CharFunction cf = CharFunction::from_eigs(oscillator_mu(), 0.0, kTheta);
        CHECK(std::abs(eval_d(cf, 0.0) - 1.0) < 1e-15);

        const RootSet rs = roots_in_disk(cf, 2.0);
        CHECK(rs.winding == 2);
        CHECK(rs.total_multiplicity() == 2);
        CHECK(has_root_near(rs, Complex(1.0, 0.0), 1e-12));
        CHECK(has_root_near(rs, Complex(-std::exp(-M_PI / 2.0), 0.0), 1e-12));

        // growing the radius picks up the reciprocal of the contracting one
        const auto three = smallest_roots(cf, 3);
        REQUIRE(three.size() == 3);
        CHECK(std::abs(three[2] - std::exp(2.0 * M_PI)) < 1e-6);
    }

    TEST_CASE("analytic derivative matches central differences") {
        const CharFunction cf = CharFunction::from_eigs(oscillator_mu(), -0.3, kTheta);
        for (Complex z : {Complex(0.4, 0.2), Complex(-0.8, 0.1), Complex(0.0, -1.1)}) {
            const double h = 1e-6;
            const Complex fd =
                (eval_d(cf, z + h) - eval_d(cf, z - h)) / (2.0 * h);
            const Complex fd_i =
                (eval_d(cf, z + Complex(0, h)) - eval_d(cf, z - Complex(0, h))) /
                Complex(0, 2.0 * h);
            const Complex dp = eval_d_prime(cf, z);
            CHECK(std::abs(dp - fd) < 1e-6 * std::max(1.0, std::abs(dp)));
            CHECK(std::abs(dp - fd_i) < 1e-6 * std::max(1.0, std::abs(dp)));
        }
    }

    TEST_CASE("logarithmic derivative equals d'/d away from roots") {
        const CharFunction cf = CharFunction::from_eigs(oscillator_mu(), -0.3, kTheta);
        for (Complex z : {Complex(0.5, 0.5), Complex(-0.4, -0.9)}) {
            const Complex ratio = eval_d_prime(cf, z) / eval_d(cf, z);
            CHECK(std::abs(log_derivative(cf, z) - ratio) < 1e-9 * std::max(1.0, std::abs(ratio)));
        }
    }

    TEST_CASE("matrix family determinant reproduces the scalar function") {
        TwistedMonodromy tm;
        tm.y_h = Mat(2, 2);
        tm.y_h << -1.5, 0.7, 0.0, 0.25;  // triangular: eigenvalues -1.5, 0.25
        tm.spectrum = CVec(2);
        tm.spectrum << Complex(-1.5, 0.0), Complex(0.25, 0.0);
        tm.trivial_index = 1;

        const CharFunction cf = CharFunction::from_monodromy(tm, -0.2, 1.3);
        for (Complex z : {Complex(0.3, 0.1), Complex(-0.9, 0.4), Complex(1.2, -0.5)}) {
            const Complex det = eval_delta(cf, z).determinant();
            CHECK(std::abs(det - eval_d(cf, z)) < 1e-12 * std::max(1.0, std::abs(det)));
        }

        const CharFunction eigs_only = CharFunction::from_eigs(tm.spectrum, -0.2, 1.3);
        CHECK_THROWS_AS(eval_delta(eigs_only, 1.0), Error);
    }

    TEST_CASE("z = 1 is a simple root exactly when 1 is an eigenvalue") {
        const CharFunction with = CharFunction::from_eigs(oscillator_mu(), -0.3, kTheta);
        const auto s = simplicity_at_one(with);
        CHECK(s.is_root);
        CHECK(s.d_abs < 1e-12);
        CHECK(std::abs(s.d_prime) > 1e-3);

        CVec no_one(2);
        no_one << Complex(-2.0, 0.0), Complex(0.3, 0.0);
        const auto s2 = simplicity_at_one(CharFunction::from_eigs(no_one, -0.3, kTheta));
        CHECK_FALSE(s2.is_root);
    }

    TEST_CASE("boundary gains put roots exactly on the unit circle") {
        // Factor of mu* = -e^{pi/2} alone; the interval ends are known in
        // closed form: upper -1/4 (flip root at z = -1), lower -1/2
        // (crossing pair at +-i).
        CVec mu(1);
        mu << Complex(-std::exp(M_PI / 2.0), 0.0);

        const CharFunction at_hi = CharFunction::from_eigs(mu, -0.25, kTheta);
        CHECK(std::abs(eval_d(at_hi, Complex(-1.0, 0.0))) < 1e-13);
        const RootSet rs_hi = roots_in_disk(at_hi, 1.05);
        CHECK(has_root_near(rs_hi, Complex(-1.0, 0.0), 1e-9));

        const CharFunction at_lo = CharFunction::from_eigs(mu, -0.5, kTheta);
        CHECK(std::abs(eval_d(at_lo, Complex(0.0, 1.0))) < 1e-13);
        CHECK(std::abs(eval_d(at_lo, Complex(0.0, -1.0))) < 1e-13);

        // just inside the interval both crossings retreat outside the circle
        for (double b : {-0.26, -0.49}) {
            CAPTURE(b);
            const RootSet rs = roots_in_disk(CharFunction::from_eigs(mu, b, kTheta), 1.0);
            CHECK(rs.total_multiplicity() == 0);
        }
        // just outside, a root intrudes
        for (double b : {-0.24, -0.51}) {
            CAPTURE(b);
            const RootSet rs = roots_in_disk(CharFunction::from_eigs(mu, b, kTheta), 1.0);
            CHECK(rs.total_multiplicity() > 0);
        }
    }

    TEST_CASE("unit-disk verdict over the full spectrum") {
        SUBCASE("no control: the expanding direction intrudes") {
            const CharFunction cf = CharFunction::from_eigs(oscillator_mu(), 0.0, kTheta);
            const DiskVerdict v = unit_disk_verdict(cf);
            CHECK_FALSE(v.stable);
            CHECK(v.roots_on_or_inside == 2);
            CHECK(v.unit_root_present);
            CHECK(v.unit_root_simple);
            REQUIRE(v.offending.size() == 1);
            CHECK(std::abs(v.offending[0] - Complex(-std::exp(-M_PI / 2.0), 0.0)) < 1e-9);
        }
        SUBCASE("midpoint gain clears the disk") {
            const CharFunction cf = CharFunction::from_eigs(oscillator_mu(), -0.375, kTheta);
            const DiskVerdict v = unit_disk_verdict(cf);
            CHECK(v.stable);
            CHECK(v.roots_on_or_inside == 1);
            CHECK(v.offending.empty());
        }
        SUBCASE("overdriven gain destabilizes again") {
            const CharFunction cf = CharFunction::from_eigs(oscillator_mu(), -0.55, kTheta);
            const DiskVerdict v = unit_disk_verdict(cf);
            CHECK_FALSE(v.stable);
        }
    }

    TEST_CASE("coincident eigenvalues yield a multiplicity-two root") {
        CVec mu(2);
        mu << Complex(-2.0, 0.0), Complex(-2.0, 0.0);
        const RootSet rs = roots_in_disk(CharFunction::from_eigs(mu, 0.0, 1.0), 1.0);
        CHECK(rs.total_multiplicity() == 2);
        CHECK(rs.winding == 2);
        CHECK(has_root_near(rs, Complex(-0.5, 0.0), 1e-10));
    }

    TEST_CASE("root search rejects a nonpositive radius") {
        const CharFunction cf = CharFunction::from_eigs(oscillator_mu(), 0.0, kTheta);
        CHECK_THROWS_AS(roots_in_disk(cf, 0.0), Error);
        CHECK_THROWS_AS(roots_in_disk(cf, -1.0), Error);
    }

    TEST_CASE("strip correspondence: branch-point double root") {
        // alpha = 1, beta = -1 collides two roots at lambda = 0.
        const auto ec = exp_correspondence(Complex(1.0, 0.0), Complex(-1.0, 0.0), 2.0);
        CHECK(ec.strip_count == 2);
        REQUIRE(ec.lambdas.size() == 1);
        CHECK(std::abs(ec.lambdas[0]) < 1e-6);
        CHECK(ec.multiplicity[0] == 2);
        CHECK(std::abs(ec.zs[0] - 1.0) < 1e-6);
        CHECK(ec.max_f_residual < 1e-8);
    }

    TEST_CASE("strip correspondence: purely imaginary crossing pair") {
        // alpha = 0, beta = -pi/2 has roots exactly at +-i pi/2.
        const auto ec = exp_correspondence(Complex(0.0, 0.0), Complex(-M_PI / 2.0, 0.0), 4.0);
        CHECK(ec.strip_count == 2);
        REQUIRE(ec.lambdas.size() == 2);
        CHECK(std::abs(ec.lambdas[0] - Complex(0.0, -M_PI / 2.0)) < 1e-10);
        CHECK(std::abs(ec.lambdas[1] - Complex(0.0, M_PI / 2.0)) < 1e-10);
        // images under z = e^{-lambda} land on the unit circle at -+i
        CHECK(std::abs(ec.zs[0] - Complex(0.0, 1.0)) < 1e-10);
        CHECK(std::abs(ec.zs[1] - Complex(0.0, -1.0)) < 1e-10);
        CHECK(ec.max_f_residual < 1e-10);
    }

    TEST_CASE("strip correspondence matches direct factor roots") {
        // For the factor 1 - mu z e^{b*(1-z)}, lambda-plane roots of
        // -z + alpha + beta e^{-z} with alpha = ln mu + b*, beta = -b* map
        // to z-plane roots under z = e^{-lambda}.
        const double bstar = -0.4 * kTheta;
        const Complex mu(-std::exp(M_PI / 2.0), 0.0);
        const Complex alpha = std::log(mu) + bstar;
        const Complex beta(-bstar, 0.0);
        const auto ec = exp_correspondence(alpha, beta, 6.0);
        REQUIRE(!ec.zs.empty());

        CVec single(1);
        single << mu;
        const CharFunction cf = CharFunction::from_eigs(single, -0.4, kTheta);
        for (const Complex z : ec.zs)
            CHECK(std::abs(eval_d(cf, z)) < 1e-9);
    }
}
