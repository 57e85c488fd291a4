#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "discwave/pipeline.hpp"
#include "discwave/report.hpp"
#include "discwave/systems.hpp"

using namespace discwave;

namespace {

struct TempDir {
    std::string path;
    TempDir() {
        char tmpl[] = "/tmp/discwave_test_XXXXXX";
        path = mkdtemp(tmpl);
    }
    std::string file(const std::string& name) const { return path + "/" + name; }
};

DiscreteWave solve_oscillator() {
    const SystemDef def = make_builtin("twisted_oscillator");
    ShootingOptions opts;
    return find_discrete_wave(def.field, def.h, def.n, def.m, def.theta_guess, def.x_guess,
                              opts);
}

SystemIdentity oscillator_identity() {
    SystemIdentity id;
    id.kind = "builtin";
    id.name = "twisted_oscillator";
    id.params = {{"w_coeff", 0.5}};
    return id;
}

}  // namespace

TEST_SUITE("report") {
    TEST_CASE("wave file round trip is bit-identical") {
        const TempDir dir;
        const DiscreteWave wave = solve_oscillator();
        const SystemIdentity id = oscillator_identity();
        const std::string path = dir.file("wave.json");
        save_wave(path, wave, id);

        const WaveFile wf = load_wave_file(path);
        CHECK(wf.identity.kind == "builtin");
        CHECK(wf.identity.name == "twisted_oscillator");
        CHECK(wf.identity.params.at("w_coeff") == 0.5);
        CHECK(wf.n == 2);
        CHECK(wf.m == 1);

        // doubles survive the JSON round trip exactly
        CHECK(wf.period == wave.period());
        CHECK(wf.theta_h == wave.theta_h());
        CHECK(wf.shooting_residual == wave.shooting_residual());
        REQUIRE(wf.anchor.size() == 3);
        for (int i = 0; i < 3; ++i) CHECK(wf.anchor[i] == wave.anchor()[i]);
        CHECK((wf.h_matrix - wave.sym().h.matrix).norm() == 0.0);
        CHECK(wf.ode.rtol == wave.ode_options().rtol);

        // saving the rebound wave reproduces the file verbatim
        const SystemDef def = make_builtin("twisted_oscillator");
        const DiscreteWave again = rebind_wave(def.field, wf);
        CHECK(again.period() == wave.period());
        for (int i = 0; i < 3; ++i) CHECK(again.anchor()[i] == wave.anchor()[i]);
        const std::string path2 = dir.file("wave2.json");
        save_wave(path2, again, id);
        std::ifstream a(path), b(path2);
        const std::string sa((std::istreambuf_iterator<char>(a)), {});
        const std::string sb((std::istreambuf_iterator<char>(b)), {});
        CHECK(sa == sb);

        // the rebound orbit is the same curve, not just the same header
        CHECK((again.state(1.0) - wave.state(1.0)).norm() < 1e-10);
    }

    TEST_CASE("wave file rejects missing, malformed and foreign inputs") {
        const TempDir dir;
        CHECK_THROWS_AS(load_wave_file(dir.file("absent.json")), Error);

        {
            std::ofstream out(dir.file("garbage.json"));
            out << "{ not json";
        }
        CHECK_THROWS_AS(load_wave_file(dir.file("garbage.json")), Error);

        {
            std::ofstream out(dir.file("foreign.json"));
            out << R"({"format": "something-else", "version": 1})";
        }
        CHECK_THROWS_AS(load_wave_file(dir.file("foreign.json")), Error);

        try {
            load_wave_file(dir.file("foreign.json"));
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::invalid_argument);
        }
    }

    TEST_CASE("rebinding to a mismatched field dimension is rejected") {
        const TempDir dir;
        const DiscreteWave wave = solve_oscillator();
        save_wave(dir.file("wave.json"), wave, oscillator_identity());
        const WaveFile wf = load_wave_file(dir.file("wave.json"));

        VectorField planar(2, [](const Vec& x) { return Vec(-x); });
        CHECK_THROWS_AS(rebind_wave(planar, wf), Error);
    }

    TEST_CASE("verdict report: key order, spectrum annotation, embedded cross-check") {
        const DiscreteWave wave = solve_oscillator();
        AnalyzeOptions aopts;
        const Analysis analysis = analyze_wave(wave, aopts);

        const auto j = verdict_json(analysis, wave, oscillator_identity());
        const std::vector<std::string> expected_keys = {
            "format", "version", "system", "wave",          "spectrum",
            "spectrum_backward_error",     "hypotheses",    "gain_interval",
            "gain_verdicts",               "oracle_check",  "stabilizable"};
        std::vector<std::string> keys;
        for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
        CHECK(keys == expected_keys);

        CHECK(j["format"] == "discwave-verdict");
        CHECK(j["stabilizable"] == true);
        CHECK(j["oracle_check"]["run"] == false);
        CHECK(j["system"]["name"] == "twisted_oscillator");
        CHECK(j["wave"]["dim"] == 3);

        // spectrum rows are modulus-sorted with exactly one trivial flag
        const auto& spec = j["spectrum"];
        REQUIRE(spec.size() == 3);
        int trivial_count = 0;
        double prev = 1e300;
        for (const auto& row : spec) {
            CHECK(row["abs"].get<double>() <= prev + 1e-15);
            prev = row["abs"].get<double>();
            if (row["is_trivial"].get<bool>()) ++trivial_count;
        }
        CHECK(trivial_count == 1);

        // attaching a verification table flips the embedded summary
        VerifyTable table;
        table.grid_m = 40;
        table.max_rel_err = 5e-4;
        table.pass = true;
        table.rows.push_back({0.0, 0, Complex(1.0, 0.0), Complex(1.0, 0.0), 1e-9});
        const auto j2 = verdict_json(analysis, wave, oscillator_identity(), &table);
        CHECK(j2["oracle_check"]["run"] == true);
        CHECK(j2["oracle_check"]["grid_m"] == 40);
        CHECK(j2["oracle_check"]["pass"] == true);

        // the serialized form parses back and preserves the stabilizability bit
        const auto round = nlohmann::json::parse(j2.dump(2));
        CHECK(round["stabilizable"] == true);
        CHECK(round["gain_interval"]["empty"] == false);
    }

    TEST_CASE("csv writers emit documented headers and full rows") {
        const DiscreteWave wave = solve_oscillator();

        std::ostringstream traj;
        write_trajectory_csv(traj, wave, 100);
        std::istringstream tin(traj.str());
        std::string header;
        std::getline(tin, header);
        CHECK(header == "t,x1,x2,x3");
        int rows = 0;
        for (std::string line; std::getline(tin, line);)
            if (!line.empty()) ++rows;
        CHECK(rows == 101);

        std::ostringstream spec;
        CVec eigs(2);
        eigs << Complex(0.5, 0.1), Complex(-3.0, 0.0);
        write_spectrum_csv(spec, eigs);
        CHECK(spec.str().substr(0, 19) == "re_mu,im_mu,abs_mu\n");
        // modulus-descending: the -3 row leads
        CHECK(spec.str().find("re_mu,im_mu,abs_mu\n-3") == 0);

        std::ostringstream roots;
        const CharFunction cf = CharFunction::from_eigs(eigs, 0.0, 1.0);
        write_roots_csv(roots, cf, roots_in_disk(cf, 5.0));
        std::istringstream rin(roots.str());
        std::getline(rin, header);
        CHECK(header == "re_z,im_z,multiplicity,abs_d");

        std::ostringstream ver;
        VerifyTable table;
        table.rows.push_back({-0.1, 0, Complex(0.5, 0.25), Complex(0.5, 0.25), 3e-11});
        write_verify_csv(ver, table);
        std::istringstream vin(ver.str());
        std::getline(vin, header);
        CHECK(header == "b,k,re_oracle,im_oracle,re_predicted,im_predicted,rel_err");
        std::string row;
        std::getline(vin, row);
        std::istringstream cells(row);
        std::vector<double> got;
        for (std::string cell; std::getline(cells, cell, ',');) got.push_back(std::stod(cell));
        REQUIRE(got.size() == 7);
        CHECK(got[0] == -0.1);
        CHECK(got[1] == 0.0);
        CHECK(got[2] == 0.5);
        CHECK(got[3] == 0.25);
        CHECK(got[6] == 3e-11);

        std::ostringstream sim;
        const HistorySegment history = HistorySegment::sample(
            [&](double s) { return wave.state(s); }, wave.theta_h(), 32);
        OdeOptions opts;
        const ControlledRun run = simulate_controlled(
            wave.field(), wave.sym().h, wave.theta_h(), 0.0, history, 1.0, opts, 8);
        write_simulation_csv(sim, run, wave);
        std::istringstream sin_(sim.str());
        std::getline(sin_, header);
        CHECK(header == "t,x1,x2,x3,control_norm,dist_to_orbit");
    }
}
