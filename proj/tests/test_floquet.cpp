#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "discwave/floquet.hpp"
#include "discwave/systems.hpp"

using namespace discwave;

namespace {

DiscreteWave solve_builtin(const std::string& name) {
    const SystemDef def = make_builtin(name);
    ShootingOptions opts;
    return find_discrete_wave(def.field, def.h, def.n, def.m, def.theta_guess, def.x_guess,
                              opts);
}

TwistedMonodromy synthetic(std::initializer_list<Complex> eigs) {
    TwistedMonodromy tm;
    tm.spectrum = CVec(static_cast<Eigen::Index>(eigs.size()));
    int i = 0;
    for (const Complex& e : eigs) tm.spectrum[i++] = e;
    int best = 0;
    for (int j = 1; j < tm.spectrum.size(); ++j)
        if (std::abs(tm.spectrum[j] - 1.0) < std::abs(tm.spectrum[best] - 1.0)) best = j;
    tm.trivial_index = best;
    return tm;
}

std::vector<double> sorted_moduli(const CVec& spec) {
    std::vector<double> mods;
    for (int j = 0; j < spec.size(); ++j) mods.push_back(std::abs(spec[j]));
    std::sort(mods.begin(), mods.end());
    return mods;
}

}  // namespace

TEST_SUITE("floquet") {
    TEST_CASE("eigen_all reports eigenvalues with a small backward error") {
        Mat a(2, 2);
        a << 0.0, -1.0, 1.0, 0.0;  // eigenvalues +-i
        double be = 1.0;
        const CVec eigs = eigen_all(a, &be);
        const auto mods = sorted_moduli(eigs);
        CHECK(std::abs(mods[0] - 1.0) < 1e-14);
        CHECK(std::abs(mods[1] - 1.0) < 1e-14);
        CHECK(std::abs(eigs[0].real()) < 1e-14);
        CHECK(be < 1e-13);

        Mat rect(2, 3);
        rect.setZero();
        CHECK_THROWS_AS(eigen_all(rect), Error);
    }

    TEST_CASE("oscillator twisted spectrum matches the closed forms") {
        const DiscreteWave wave = solve_builtin("twisted_oscillator");
        OdeOptions opts;
        const TwistedMonodromy tm = twisted_monodromy(wave, opts);

        REQUIRE(tm.spectrum.size() == 3);
        CHECK(tm.backward_error < 1e-12);

        // {exp(-2 pi), 1, -exp(pi/2)}: radial contraction over the half
        // period, the trivial direction, and the flipped odd direction.
        auto nearest = [&](Complex target) {
            double best = 1e300;
            for (int j = 0; j < 3; ++j) best = std::min(best, std::abs(tm.spectrum[j] - target));
            return best;
        };
        CHECK(nearest(Complex(std::exp(-2.0 * M_PI), 0.0)) < 1e-7);
        CHECK(nearest(Complex(1.0, 0.0)) < 1e-7);
        CHECK(nearest(Complex(-std::exp(M_PI / 2.0), 0.0)) < 1e-6);

        CHECK(std::abs(tm.spectrum[tm.trivial_index] - 1.0) < 1e-7);
        CHECK((wave.sym().h.matrix * tm.y_h - tm.y_theta).norm() < 1e-12);
    }

    TEST_CASE("power identity and volume growth hold on the oscillator") {
        const DiscreteWave wave = solve_builtin("twisted_oscillator");
        OdeOptions opts;
        const TwistedMonodromy tm = twisted_monodromy(wave, opts);
        CHECK(verify_power_identity(wave, tm, opts) < 1e-8);
        CHECK(liouville_residual(wave, tm, opts) < 1e-8);
    }

    TEST_CASE("power identity and volume growth hold on lorenz") {
        const DiscreteWave wave = solve_builtin("lorenz");
        OdeOptions opts;
        const TwistedMonodromy tm = twisted_monodromy(wave, opts);
        CHECK(verify_power_identity(wave, tm, opts) < 1e-6);
        CHECK(liouville_residual(wave, tm, opts) < 1e-6);
    }

    TEST_CASE("hypotheses pass on the oscillator and fail on the odd-unstable variant") {
        OdeOptions opts;
        HypothesisTols tols;

        const DiscreteWave good = solve_builtin("twisted_oscillator");
        const HypothesisReport ok = check_hypotheses(twisted_monodromy(good, opts), tols);
        CHECK(ok.trivial_simple);
        CHECK(ok.unit_circle_clear);
        CHECK(ok.all_in_window);
        CHECK(ok.pass());
        REQUIRE(ok.unstable.size() == 1);
        CHECK(ok.unstable[0].real() < -1.0);
        CHECK(ok.margin > 0.5);  // -e^{pi/2} sits well inside (-e^2, -1)

        const DiscreteWave bad = solve_builtin("positive_unstable");
        const HypothesisReport rej = check_hypotheses(twisted_monodromy(bad, opts), tols);
        CHECK(rej.trivial_simple);
        CHECK_FALSE(rej.all_in_window);
        CHECK_FALSE(rej.pass());
        CHECK(rej.diagnosis.find("outside (-e^2, -1)") != std::string::npos);
        REQUIRE(rej.unstable.size() == 1);
        CHECK(std::abs(rej.unstable[0].real() - std::exp(0.35 * M_PI)) < 1e-6);
    }

    TEST_CASE("fully contracting spectrum passes with no unstable directions") {
        const DiscreteWave wave = solve_builtin("stable_oscillator");
        OdeOptions opts;
        HypothesisTols tols;
        const HypothesisReport rep = check_hypotheses(twisted_monodromy(wave, opts), tols);
        CHECK(rep.pass());
        CHECK(rep.unstable.empty());
        CHECK(rep.margin == 0.0);
    }

    TEST_CASE("hypothesis screen on synthetic spectra") {
        HypothesisTols tols;

        SUBCASE("clean window membership passes") {
            const auto rep = check_hypotheses(synthetic({1.0, -2.0, 0.1}), tols);
            CHECK(rep.pass());
            CHECK(rep.margin == doctest::Approx(1.0));
        }
        SUBCASE("doubled trivial eigenvalue fails") {
            const auto rep = check_hypotheses(synthetic({1.0, 1.0, 0.1}), tols);
            CHECK_FALSE(rep.trivial_simple);
            CHECK_FALSE(rep.pass());
        }
        SUBCASE("near-degenerate second eigenvalue fails the separation floor") {
            const auto rep = check_hypotheses(synthetic({1.0, 1.00005, 0.1}), tols);
            CHECK_FALSE(rep.trivial_simple);
        }
        SUBCASE("nontrivial unit-circle eigenvalue fails") {
            const auto rep = check_hypotheses(synthetic({1.0, Complex(0.0, 1.0), 0.1}), tols);
            CHECK_FALSE(rep.unit_circle_clear);
            CHECK_FALSE(rep.pass());
        }
        SUBCASE("unstable eigenvalue below -e^2 fails") {
            const auto rep = check_hypotheses(synthetic({1.0, -8.0, 0.1}), tols);
            CHECK_FALSE(rep.all_in_window);
            CHECK(rep.diagnosis.find("outside") != std::string::npos);
        }
        SUBCASE("positive unstable eigenvalue fails") {
            const auto rep = check_hypotheses(synthetic({1.0, 2.5, 0.1}), tols);
            CHECK_FALSE(rep.all_in_window);
        }
        SUBCASE("complex unstable eigenvalue fails") {
            const auto rep = check_hypotheses(synthetic({1.0, Complex(-2.0, 0.5), 0.1}), tols);
            CHECK_FALSE(rep.all_in_window);
            CHECK(rep.diagnosis.find("complex") != std::string::npos);
        }
    }
}
