#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

#include "discwave/dde.hpp"
#include "discwave/flow.hpp"
#include "discwave/pipeline.hpp"

namespace discwave {

// Where the vector field came from, so a wave file can be re-bound to it.
struct SystemIdentity {
    std::string kind;  // "builtin", "plugin" or "custom"
    std::string name;
    std::map<std::string, double> params;
    std::string plugin_path;
};

void save_wave(const std::string& path, const DiscreteWave& wave, const SystemIdentity& identity);

struct WaveFile {
    SystemIdentity identity;
    Mat h_matrix;
    std::string h_label;
    int n = 1;
    int m = 1;
    double theta_h = 0.0;
    double period = 0.0;
    Vec anchor;
    double shooting_residual = 0.0;
    OdeOptions ode;
};

WaveFile load_wave_file(const std::string& path);

// Re-integrates the orbit from the stored anchor (deterministic, so the
// anchor and period round-trip bit-identically).
DiscreteWave rebind_wave(const VectorField& field, const WaveFile& wf);

nlohmann::ordered_json verdict_json(const Analysis& analysis, const DiscreteWave& wave,
                                    const SystemIdentity& identity,
                                    const VerifyTable* oracle_check = nullptr);

void write_trajectory_csv(std::ostream& out, const DiscreteWave& wave, int samples = 1000);
void write_spectrum_csv(std::ostream& out, const CVec& spectrum);
void write_roots_csv(std::ostream& out, const CharFunction& cf, const RootSet& roots);
void write_simulation_csv(std::ostream& out, const ControlledRun& run, const DiscreteWave& wave);
void write_verify_csv(std::ostream& out, const VerifyTable& table);

}  // namespace discwave
