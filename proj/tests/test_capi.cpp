#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "discwave.h"

namespace {

struct TempDir {
    std::string path;
    TempDir() {
        char tmpl[] = "/tmp/discwave_capi_XXXXXX";
        path = mkdtemp(tmpl);
    }
    std::string file(const std::string& name) const { return path + "/" + name; }
};

struct SystemGuard {
    dw_system* sys = nullptr;
    ~SystemGuard() { dw_system_free(sys); }
};
struct WaveGuard {
    dw_wave* wave = nullptr;
    ~WaveGuard() { dw_wave_free(wave); }
};
struct AnalysisGuard {
    dw_analysis* analysis = nullptr;
    ~AnalysisGuard() { dw_analysis_free(analysis); }
};

bool file_nonempty(const std::string& path) {
    std::ifstream in(path);
    std::string first;
    return in && std::getline(in, first) && !first.empty();
}

// field/jacobian callbacks for the custom-system path: the benchmark
// oscillator written out by hand
void osc_field(const double* x, double* fx, void*) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    fx[0] = x[0] * (1.0 - r2) - x[1];
    fx[1] = x[1] * (1.0 - r2) + x[0];
    fx[2] = x[2] * (0.5 - x[2] * x[2]);
}

}  // namespace

TEST_CASE("version and initial error state") {
    CHECK(dw_version() != nullptr);
    CHECK(dw_last_error() != nullptr);
}

TEST_CASE("builtin lifecycle: find, save, load, analyze, simulate, verify") {
    const TempDir dir;

    SystemGuard sys;
    REQUIRE(dw_system_builtin("twisted_oscillator", nullptr, &sys.sys) == DW_OK);
    CHECK(dw_system_dim(sys.sys) == 3);
    CHECK(std::string(dw_system_name(sys.sys)) == "twisted_oscillator");

    double equiv = 1.0;
    REQUIRE(dw_system_equivariance(sys.sys, 7, 16, &equiv) == DW_OK);
    CHECK(equiv < 1e-9);

    WaveGuard wave;
    REQUIRE(dw_find_wave(sys.sys, nullptr, 0.0, nullptr, &wave.wave) == DW_OK);

    double anchor[3], period = 0.0, theta = 0.0, resid = 1.0;
    REQUIRE(dw_wave_info(wave.wave, anchor, &period, &theta, &resid) == DW_OK);
    CHECK(std::abs(period - 2.0 * M_PI) < 1e-8);
    CHECK(std::abs(theta - M_PI) < 1e-8);
    CHECK(resid < 1e-10);
    CHECK(std::abs(anchor[0] * anchor[0] + anchor[1] * anchor[1] - 1.0) < 1e-9);

    double x_mid[3];
    REQUIRE(dw_wave_eval(wave.wave, period / 2.0, x_mid) == DW_OK);
    CHECK(std::abs(x_mid[0] + anchor[0]) < 1e-8);  // antipode after half a period
    CHECK(std::abs(x_mid[1] + anchor[1]) < 1e-8);

    const std::string wave_path = dir.file("wave.json");
    REQUIRE(dw_wave_save(wave.wave, wave_path.c_str()) == DW_OK);
    REQUIRE(dw_wave_write_trajectory(wave.wave, dir.file("traj.csv").c_str(), 64) == DW_OK);
    CHECK(file_nonempty(dir.file("traj.csv")));

    // peek reads the identity without binding
    char kind[16], name[64];
    char* params = nullptr;
    REQUIRE(dw_wave_peek_system(wave_path.c_str(), kind, sizeof kind, name, sizeof name, nullptr,
                                0, &params) == DW_OK);
    CHECK(std::string(kind) == "builtin");
    CHECK(std::string(name) == "twisted_oscillator");
    REQUIRE(params != nullptr);
    CHECK(std::string(params).find("w_coeff") != std::string::npos);
    dw_string_free(params);

    // load round trip preserves the header values exactly
    WaveGuard loaded;
    REQUIRE(dw_wave_load(sys.sys, wave_path.c_str(), &loaded.wave) == DW_OK);
    double anchor2[3], period2 = 0.0;
    REQUIRE(dw_wave_info(loaded.wave, anchor2, &period2, nullptr, nullptr) == DW_OK);
    CHECK(period2 == period);
    for (int i = 0; i < 3; ++i) CHECK(anchor2[i] == anchor[i]);

    AnalysisGuard analysis;
    REQUIRE(dw_analyze(loaded.wave, nullptr, &analysis.analysis) == DW_OK);

    int stabilizable = 0;
    REQUIRE(dw_analysis_stabilizable(analysis.analysis, &stabilizable) == DW_OK);
    CHECK(stabilizable == 1);

    double b_lo = 0.0, b_hi = 0.0;
    int empty = 1, unbounded = 1;
    REQUIRE(dw_analysis_gain_interval(analysis.analysis, &b_lo, &b_hi, &empty, &unbounded) ==
            DW_OK);
    CHECK(empty == 0);
    CHECK(unbounded == 0);
    CHECK(std::abs(b_hi + 0.25) < 1e-9);
    CHECK(std::abs(b_lo + 0.5) < 1e-6);

    double re[8], im[8];
    int count = 0;
    REQUIRE(dw_analysis_spectrum(analysis.analysis, re, im, 8, &count) == DW_OK);
    REQUIRE(count == 3);
    double best_trivial = 1e300, best_odd = 1e300;
    for (int i = 0; i < count; ++i) {
        best_trivial = std::min(best_trivial, std::hypot(re[i] - 1.0, im[i]));
        best_odd = std::min(best_odd, std::hypot(re[i] + std::exp(M_PI / 2.0), im[i]));
    }
    CHECK(best_trivial < 1e-7);
    CHECK(best_odd < 1e-6);

    char* json = nullptr;
    REQUIRE(dw_analysis_json(analysis.analysis, &json) == DW_OK);
    REQUIRE(json != nullptr);
    CHECK(std::string(json).find("\"stabilizable\": true") != std::string::npos);
    dw_string_free(json);

    REQUIRE(dw_analysis_write_artifacts(analysis.analysis, dir.file("out").c_str(), 0, 0.0) ==
            DW_OK);
    CHECK(file_nonempty(dir.file("out/verdict.json")));
    CHECK(file_nonempty(dir.file("out/spectrum.csv")));
    CHECK(file_nonempty(dir.file("out/roots_0.csv")));

    // a stabilizing gain contracts the perturbation, an outside gain does not
    double d0 = 0.0, d1 = 0.0;
    REQUIRE(dw_simulate(wave.wave, -0.35, 1e-3, 10, dir.file("sim.csv").c_str(), &d0, &d1) ==
            DW_OK);
    CHECK(d0 == doctest::Approx(1e-3).epsilon(0.05));
    CHECK(d1 < d0 / 5.0);
    CHECK(file_nonempty(dir.file("sim.csv")));

    double g0 = 0.0, g1 = 0.0;
    REQUIRE(dw_simulate(wave.wave, -0.1, 1e-3, 10, nullptr, &g0, &g1) == DW_OK);
    CHECK(g1 > 2.0 * g0);

    // oracle cross-check at a modest grid
    const double gains[2] = {0.0, -0.35};
    double worst = 1.0;
    REQUIRE(dw_verify(wave.wave, gains, 2, 80, 1e-2, dir.file("verify.csv").c_str(), &worst) ==
            DW_OK);
    CHECK(worst < 1e-3);
    CHECK(file_nonempty(dir.file("verify.csv")));

    REQUIRE(dw_region_chart(wave.wave, dir.file("chart").c_str()) == DW_OK);
    CHECK(file_nonempty(dir.file("chart/region.csv")));
    CHECK(file_nonempty(dir.file("chart/gain_path.csv")));
}

TEST_CASE("custom system descriptor drives the same pipeline") {
    const double h[9] = {-1, 0, 0, 0, -1, 0, 0, 0, -1};
    const double guess[3] = {1.1, 0.0, 0.05};

    dw_system_desc desc{};
    desc.name = "hand_rolled";
    desc.dim = 3;
    desc.field = osc_field;
    desc.jacobian = nullptr;  // exercise the finite-difference path
    desc.h_row_major = h;
    desc.n = 2;
    desc.m = 1;
    desc.x_guess = guess;
    desc.theta_guess = 3.0;

    SystemGuard sys;
    REQUIRE(dw_system_custom(&desc, &sys.sys) == DW_OK);
    CHECK(std::string(dw_system_name(sys.sys)) == "hand_rolled");

    WaveGuard wave;
    REQUIRE(dw_find_wave(sys.sys, nullptr, 0.0, "{\"shooting_tol\": 1e-11}", &wave.wave) ==
            DW_OK);
    double period = 0.0;
    REQUIRE(dw_wave_info(wave.wave, nullptr, &period, nullptr, nullptr) == DW_OK);
    CHECK(std::abs(period - 2.0 * M_PI) < 1e-7);

    AnalysisGuard analysis;
    REQUIRE(dw_analyze(wave.wave, "{\"gains\": [0.0, -0.3]}", &analysis.analysis) == DW_OK);
    int stabilizable = 0;
    REQUIRE(dw_analysis_stabilizable(analysis.analysis, &stabilizable) == DW_OK);
    CHECK(stabilizable == 1);

    // tag the origin so the wave file records how to rebuild the system
    const TempDir dir;
    REQUIRE(dw_system_set_origin(sys.sys, "plugin", "/somewhere/hand_rolled.so") == DW_OK);
    WaveGuard tagged;
    REQUIRE(dw_find_wave(sys.sys, nullptr, 0.0, nullptr, &tagged.wave) == DW_OK);
    REQUIRE(dw_wave_save(tagged.wave, dir.file("wave.json").c_str()) == DW_OK);

    char kind[16], path[128];
    REQUIRE(dw_wave_peek_system(dir.file("wave.json").c_str(), kind, sizeof kind, nullptr, 0,
                                path, sizeof path, nullptr) == DW_OK);
    CHECK(std::string(kind) == "plugin");
    CHECK(std::string(path) == "/somewhere/hand_rolled.so");
}

TEST_CASE("usage errors are reported with codes and messages") {
    SystemGuard sys;
    CHECK(dw_system_builtin("no_such_system", nullptr, &sys.sys) == DW_ERR_USAGE);
    CHECK(std::strlen(dw_last_error()) > 0);
    CHECK(dw_system_builtin("twisted_oscillator", "{\"bogus\": 1}", &sys.sys) == DW_ERR_USAGE);
    CHECK(dw_system_builtin("twisted_oscillator", "not json", &sys.sys) == DW_ERR_USAGE);
    CHECK(dw_system_builtin(nullptr, nullptr, &sys.sys) == DW_ERR_USAGE);

    REQUIRE(dw_system_builtin("twisted_oscillator", nullptr, &sys.sys) == DW_OK);

    WaveGuard wave;
    CHECK(dw_find_wave(nullptr, nullptr, 0.0, nullptr, &wave.wave) == DW_ERR_USAGE);
    CHECK(dw_find_wave(sys.sys, nullptr, 0.0, "{\"max_iter\": -3}", &wave.wave) == DW_ERR_USAGE);
    CHECK(dw_find_wave(sys.sys, nullptr, 0.0, "{\"unknown_option\": 1}", &wave.wave) ==
          DW_ERR_USAGE);

    // a hopeless guess is a convergence failure, not a usage error
    const double bad[3] = {40.0, 40.0, 9.0};
    CHECK(dw_find_wave(sys.sys, bad, 0.4, nullptr, &wave.wave) == DW_ERR_NOCONV);

    CHECK(dw_wave_load(sys.sys, "/nonexistent/wave.json", &wave.wave) == DW_ERR_USAGE);

    // loading under a mismatched system identity is rejected
    const TempDir dir;
    WaveGuard good;
    REQUIRE(dw_find_wave(sys.sys, nullptr, 0.0, nullptr, &good.wave) == DW_OK);
    REQUIRE(dw_wave_save(good.wave, dir.file("wave.json").c_str()) == DW_OK);
    SystemGuard other;
    REQUIRE(dw_system_builtin("lorenz", nullptr, &other.sys) == DW_OK);
    CHECK(dw_wave_load(other.sys, dir.file("wave.json").c_str(), &wave.wave) == DW_ERR_USAGE);
    SystemGuard reparam;
    REQUIRE(dw_system_builtin("twisted_oscillator", "{\"w_coeff\": 0.4}", &reparam.sys) == DW_OK);
    CHECK(dw_wave_load(reparam.sys, dir.file("wave.json").c_str(), &wave.wave) == DW_ERR_USAGE);

    AnalysisGuard analysis;
    CHECK(dw_analyze(nullptr, nullptr, &analysis.analysis) == DW_ERR_USAGE);
    CHECK(dw_analyze(good.wave, "{\"gain_cap\": -5}", &analysis.analysis) == DW_ERR_USAGE);

    double out = 0.0;
    CHECK(dw_simulate(good.wave, -0.35, 1e-3, 0, nullptr, &out, &out) == DW_ERR_USAGE);
    CHECK(dw_verify(good.wave, nullptr, 0, 40, 0.0, nullptr, &out) == DW_ERR_USAGE);
}

TEST_CASE("verification failure surfaces as DW_ERR_VERIFY") {
    SystemGuard sys;
    REQUIRE(dw_system_builtin("twisted_oscillator", nullptr, &sys.sys) == DW_OK);
    WaveGuard wave;
    REQUIRE(dw_find_wave(sys.sys, nullptr, 0.0, nullptr, &wave.wave) == DW_OK);

    // an absurdly tight tolerance cannot be met by any finite grid
    const double gains[1] = {-0.35};
    double worst = 0.0;
    CHECK(dw_verify(wave.wave, gains, 1, 40, 1e-15, nullptr, &worst) == DW_ERR_VERIFY);
    CHECK(worst > 1e-15);
    CHECK(std::strlen(dw_last_error()) > 0);
}
