#include "discwave.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "discwave/charfn.hpp"
#include "discwave/dde.hpp"
#include "discwave/flow.hpp"
#include "discwave/hayes.hpp"
#include "discwave/pipeline.hpp"
#include "discwave/report.hpp"
#include "discwave/systems.hpp"
#include "discwave/types.hpp"

using discwave::Analysis;
using discwave::Complex;
using discwave::DiscreteWave;
using discwave::Error;
using discwave::ErrorCode;
using discwave::Mat;
using discwave::SystemDef;
using discwave::SystemIdentity;
using discwave::Vec;

struct dw_system {
    SystemDef def;
    SystemIdentity identity;
};

struct dw_wave {
    DiscreteWave wave;
    SystemIdentity identity;
};

struct dw_analysis {
    Analysis analysis;
    DiscreteWave wave;
    SystemIdentity identity;
};

namespace {

thread_local std::string g_last_error;

dw_status status_of(const Error& e) {
    switch (e.code()) {
        case ErrorCode::invalid_argument: return DW_ERR_USAGE;
        case ErrorCode::no_convergence: return DW_ERR_NOCONV;
        case ErrorCode::verification: return DW_ERR_VERIFY;
        case ErrorCode::internal: return DW_ERR_INTERNAL;
    }
    return DW_ERR_INTERNAL;
}

template <typename F>
dw_status guarded(F&& f) {
    try {
        f();
        return DW_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DW_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return DW_ERR_INTERNAL;
    }
}

nlohmann::json parse_opts(const char* s, std::initializer_list<const char*> allowed) {
    if (s == nullptr || *s == '\0') return nlohmann::json::object();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(s);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string("options parse error: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "options must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            throw Error(ErrorCode::invalid_argument, "unknown option: " + key);
    }
    return j;
}

void copy_str(const std::string& s, char* dst, int cap) {
    if (dst == nullptr || cap <= 0) return;
    std::snprintf(dst, static_cast<std::size_t>(cap), "%s", s.c_str());
}

char* dup_str(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

const dw_wave* require(const dw_wave* w) {
    if (w == nullptr) throw Error(ErrorCode::invalid_argument, "null wave handle");
    return w;
}

const dw_system* require(const dw_system* s) {
    if (s == nullptr) throw Error(ErrorCode::invalid_argument, "null system handle");
    return s;
}

const dw_analysis* require(const dw_analysis* a) {
    if (a == nullptr) throw Error(ErrorCode::invalid_argument, "null analysis handle");
    return a;
}

// Unit real vector along the largest-modulus nontrivial eigendirection of
// the twisted step.
Vec transverse_direction(const DiscreteWave& wave) {
    const discwave::TwistedMonodromy tm =
        discwave::twisted_monodromy(wave, wave.ode_options());
    Eigen::EigenSolver<Mat> es(tm.y_h);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::internal, "eigensolver failed on the twisted step");
    const auto& vals = es.eigenvalues();
    Eigen::Index trivial = 0;
    for (Eigen::Index i = 1; i < vals.size(); ++i)
        if (std::abs(vals[i] - 1.0) < std::abs(vals[trivial] - 1.0)) trivial = i;
    Eigen::Index pick = -1;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (i == trivial) continue;
        if (pick < 0 || std::abs(vals[i]) > std::abs(vals[pick])) pick = i;
    }
    if (pick < 0) pick = trivial;
    Vec dir = es.eigenvectors().col(pick).real();
    if (dir.norm() < 1e-8) dir = es.eigenvectors().col(pick).imag();
    if (dir.norm() < 1e-8) throw Error(ErrorCode::internal, "degenerate eigendirection");
    return dir / dir.norm();
}

}  // namespace

extern "C" {

const char* dw_last_error(void) { return g_last_error.c_str(); }

const char* dw_version(void) { return "0.1.0"; }

dw_status dw_system_builtin(const char* name, const char* params_json, dw_system** out) {
    return guarded([&] {
        if (name == nullptr || out == nullptr)
            throw Error(ErrorCode::invalid_argument, "null argument");
        std::map<std::string, double> overrides;
        if (params_json != nullptr && *params_json != '\0') {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(params_json);
            } catch (const std::exception& e) {
                throw Error(ErrorCode::invalid_argument,
                            std::string("params parse error: ") + e.what());
            }
            if (!j.is_object())
                throw Error(ErrorCode::invalid_argument, "params must be a JSON object");
            for (const auto& [k, v] : j.items()) {
                if (!v.is_number())
                    throw Error(ErrorCode::invalid_argument, "param " + k + " must be a number");
                overrides[k] = v.get<double>();
            }
        }
        auto sys = std::make_unique<dw_system>();
        sys->def = discwave::make_builtin(name, overrides);
        sys->identity.kind = "builtin";
        sys->identity.name = sys->def.name;
        sys->identity.params = sys->def.params;
        *out = sys.release();
    });
}

dw_status dw_system_custom(const dw_system_desc* desc, dw_system** out) {
    return guarded([&] {
        if (desc == nullptr || out == nullptr)
            throw Error(ErrorCode::invalid_argument, "null argument");
        if (desc->name == nullptr || desc->dim <= 0 || desc->field == nullptr ||
            desc->h_row_major == nullptr)
            throw Error(ErrorCode::invalid_argument, "incomplete system description");
        const int dim = desc->dim;
        const dw_field_fn field = desc->field;
        const dw_jac_fn jac = desc->jacobian;
        void* user = desc->user;

        discwave::VectorField::EvalFn eval = [dim, field, user](const Vec& x) {
            Vec fx(dim);
            field(x.data(), fx.data(), user);
            return fx;
        };
        discwave::VectorField::JacFn jfn;
        if (jac != nullptr) {
            jfn = [dim, jac, user](const Vec& x) {
                std::vector<double> buf(static_cast<std::size_t>(dim) * dim);
                jac(x.data(), buf.data(), user);
                Mat j(dim, dim);
                for (int i = 0; i < dim; ++i)
                    for (int k = 0; k < dim; ++k) j(i, k) = buf[static_cast<std::size_t>(i) * dim + k];
                return j;
            };
        }

        auto sys = std::make_unique<dw_system>();
        sys->def.name = desc->name;
        sys->def.field = discwave::VectorField(dim, std::move(eval), std::move(jfn));
        Mat h(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k)
                h(i, k) = desc->h_row_major[static_cast<std::size_t>(i) * dim + k];
        sys->def.h = discwave::GroupElement{h, desc->name + std::string("_h"), desc->n};
        sys->def.n = desc->n;
        sys->def.m = desc->m;
        if (desc->x_guess != nullptr)
            sys->def.x_guess = Eigen::Map<const Vec>(desc->x_guess, dim);
        sys->def.theta_guess = desc->theta_guess;
        sys->identity.kind = "custom";
        sys->identity.name = sys->def.name;
        *out = sys.release();
    });
}

dw_status dw_system_set_origin(dw_system* sys, const char* kind, const char* path) {
    return guarded([&] {
        if (sys == nullptr || kind == nullptr)
            throw Error(ErrorCode::invalid_argument, "null argument");
        sys->identity.kind = kind;
        sys->identity.plugin_path = path != nullptr ? path : "";
    });
}

void dw_system_free(dw_system* sys) { delete sys; }

int dw_system_dim(const dw_system* sys) { return sys != nullptr ? sys->def.field.dim() : 0; }

const char* dw_system_name(const dw_system* sys) {
    return sys != nullptr ? sys->def.name.c_str() : "";
}

dw_status dw_system_equivariance(const dw_system* sys, unsigned long seed, int n_samples,
                                 double* max_residual) {
    return guarded([&] {
        require(sys);
        if (max_residual == nullptr) throw Error(ErrorCode::invalid_argument, "null output");
        if (n_samples <= 0) throw Error(ErrorCode::invalid_argument, "n_samples must be positive");
        const int dim = sys->def.field.dim();
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        double scale = 1.0;
        Vec base = Vec::Zero(dim);
        if (sys->def.x_guess.size() == dim) {
            base = sys->def.x_guess;
            scale = std::max(1.0, 0.5 * base.norm());
        }
        std::vector<Vec> samples;
        samples.reserve(static_cast<std::size_t>(n_samples));
        for (int i = 0; i < n_samples; ++i) {
            Vec x(dim);
            for (int k = 0; k < dim; ++k) x[k] = gauss(rng);
            samples.push_back(base + scale * x);
        }
        *max_residual = discwave::check_equivariance(sys->def.field, sys->def.h, samples);
    });
}

dw_status dw_find_wave(const dw_system* sys, const double* x_guess, double theta_guess,
                       const char* opts_json, dw_wave** out) {
    return guarded([&] {
        require(sys);
        if (out == nullptr) throw Error(ErrorCode::invalid_argument, "null output");
        const nlohmann::json j = parse_opts(opts_json, {"ode_tol", "shooting_tol", "max_iter"});
        discwave::ShootingOptions opts;
        if (j.contains("ode_tol")) {
            opts.ode.rtol = j["ode_tol"].get<double>();
            opts.ode.atol = opts.ode.rtol;
        }
        if (j.contains("shooting_tol")) opts.tol = j["shooting_tol"].get<double>();
        if (j.contains("max_iter")) opts.max_iter = j["max_iter"].get<int>();
        if (!(opts.ode.rtol > 0.0) || !(opts.tol > 0.0) || opts.max_iter < 1)
            throw Error(ErrorCode::invalid_argument, "tolerances and max_iter must be positive");

        Vec guess;
        if (x_guess != nullptr)
            guess = Eigen::Map<const Vec>(x_guess, sys->def.field.dim());
        else if (sys->def.x_guess.size() == sys->def.field.dim())
            guess = sys->def.x_guess;
        else
            throw Error(ErrorCode::invalid_argument, "no starting guess for the orbit search");
        const double theta = theta_guess > 0.0 ? theta_guess : sys->def.theta_guess;
        if (theta <= 0.0)
            throw Error(ErrorCode::invalid_argument, "no starting guess for the phase lag");

        auto w = std::make_unique<dw_wave>();
        w->wave = discwave::find_discrete_wave(sys->def.field, sys->def.h, sys->def.n, sys->def.m,
                                               theta, guess, opts);
        w->identity = sys->identity;
        *out = w.release();
    });
}

void dw_wave_free(dw_wave* wave) { delete wave; }

dw_status dw_wave_save(const dw_wave* wave, const char* path) {
    return guarded([&] {
        require(wave);
        if (path == nullptr) throw Error(ErrorCode::invalid_argument, "null path");
        discwave::save_wave(path, wave->wave, wave->identity);
    });
}

dw_status dw_wave_load(const dw_system* sys, const char* path, dw_wave** out) {
    return guarded([&] {
        require(sys);
        if (path == nullptr || out == nullptr)
            throw Error(ErrorCode::invalid_argument, "null argument");
        const discwave::WaveFile wf = discwave::load_wave_file(path);
        if (wf.identity.kind == "builtin" && sys->identity.kind == "builtin") {
            if (wf.identity.name != sys->identity.name)
                throw Error(ErrorCode::invalid_argument,
                            "wave file was computed for system " + wf.identity.name);
            if (wf.identity.params != sys->identity.params)
                throw Error(ErrorCode::invalid_argument,
                            "wave file was computed with different parameters");
        }
        auto w = std::make_unique<dw_wave>();
        w->wave = discwave::rebind_wave(sys->def.field, wf);
        w->identity = wf.identity;
        *out = w.release();
    });
}

dw_status dw_wave_peek_system(const char* path, char* kind, int kind_cap, char* name, int name_cap,
                              char* plugin_path, int path_cap, char** params_json) {
    return guarded([&] {
        if (path == nullptr) throw Error(ErrorCode::invalid_argument, "null path");
        const discwave::WaveFile wf = discwave::load_wave_file(path);
        copy_str(wf.identity.kind, kind, kind_cap);
        copy_str(wf.identity.name, name, name_cap);
        copy_str(wf.identity.plugin_path, plugin_path, path_cap);
        if (params_json != nullptr) {
            nlohmann::json pj = nlohmann::json::object();
            for (const auto& [k, v] : wf.identity.params) pj[k] = v;
            *params_json = dup_str(pj.dump());
        }
    });
}

dw_status dw_wave_info(const dw_wave* wave, double* anchor, double* period, double* theta_h,
                       double* shooting_residual) {
    return guarded([&] {
        require(wave);
        const DiscreteWave& w = wave->wave;
        if (anchor != nullptr)
            Eigen::Map<Vec>(anchor, w.anchor().size()) = w.anchor();
        if (period != nullptr) *period = w.period();
        if (theta_h != nullptr) *theta_h = w.theta_h();
        if (shooting_residual != nullptr) *shooting_residual = w.shooting_residual();
    });
}

dw_status dw_wave_eval(const dw_wave* wave, double t, double* x_out) {
    return guarded([&] {
        require(wave);
        if (x_out == nullptr) throw Error(ErrorCode::invalid_argument, "null output");
        const Vec x = wave->wave.state(t);
        Eigen::Map<Vec>(x_out, x.size()) = x;
    });
}

dw_status dw_wave_write_trajectory(const dw_wave* wave, const char* csv_path, int samples) {
    return guarded([&] {
        require(wave);
        if (csv_path == nullptr) throw Error(ErrorCode::invalid_argument, "null path");
        if (samples < 2) throw Error(ErrorCode::invalid_argument, "samples must be at least 2");
        std::ofstream out(csv_path);
        if (!out)
            throw Error(ErrorCode::invalid_argument,
                        std::string("cannot open for writing: ") + csv_path);
        discwave::write_trajectory_csv(out, wave->wave, samples);
    });
}

dw_status dw_analyze(const dw_wave* wave, const char* opts_json, dw_analysis** out) {
    return guarded([&] {
        require(wave);
        if (out == nullptr) throw Error(ErrorCode::invalid_argument, "null output");
        const nlohmann::json j =
            parse_opts(opts_json, {"gain_cap", "gains", "eig_tol", "sep_floor", "ode_tol"});
        discwave::AnalyzeOptions opts;
        opts.ode = wave->wave.ode_options();
        if (j.contains("gain_cap")) opts.gain_cap = j["gain_cap"].get<double>();
        if (j.contains("gains")) opts.gain_samples = j["gains"].get<std::vector<double>>();
        if (j.contains("eig_tol")) opts.tols.eig_tol = j["eig_tol"].get<double>();
        if (j.contains("sep_floor")) opts.tols.sep_floor = j["sep_floor"].get<double>();
        if (j.contains("ode_tol")) {
            opts.ode.rtol = j["ode_tol"].get<double>();
            opts.ode.atol = opts.ode.rtol;
        }
        if (!(opts.gain_cap > 0.0) || !(opts.ode.rtol > 0.0))
            throw Error(ErrorCode::invalid_argument, "gain_cap and ode_tol must be positive");
        auto a = std::make_unique<dw_analysis>();
        a->analysis = discwave::analyze_wave(wave->wave, opts);
        a->wave = wave->wave;
        a->identity = wave->identity;
        *out = a.release();
    });
}

void dw_analysis_free(dw_analysis* analysis) { delete analysis; }

dw_status dw_analysis_json(const dw_analysis* analysis, char** out) {
    return guarded([&] {
        require(analysis);
        if (out == nullptr) throw Error(ErrorCode::invalid_argument, "null output");
        const nlohmann::ordered_json j =
            discwave::verdict_json(analysis->analysis, analysis->wave, analysis->identity);
        *out = dup_str(j.dump(2));
    });
}

void dw_string_free(char* s) { delete[] s; }

dw_status dw_analysis_write_artifacts(const dw_analysis* analysis, const char* out_dir, int grid_m,
                                      double root_radius) {
    return guarded([&] {
        require(analysis);
        if (out_dir == nullptr) throw Error(ErrorCode::invalid_argument, "null output directory");
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        const double radius = root_radius > 0.0 ? root_radius : 2.0;

        {
            std::ofstream out(dir / "spectrum.csv");
            if (!out)
                throw Error(ErrorCode::invalid_argument,
                            "cannot write into " + std::string(out_dir));
            discwave::write_spectrum_csv(out, analysis->analysis.tm.spectrum);
        }

        const double theta = analysis->wave.theta_h();
        for (std::size_t i = 0; i < analysis->analysis.gain_verdicts.size(); ++i) {
            const double b = analysis->analysis.gain_verdicts[i].b;
            const discwave::CharFunction cf =
                discwave::CharFunction::from_monodromy(analysis->analysis.tm, b, theta);
            // at large |b*| the disk fills with roots at spacing 2 pi/|b*|;
            // keep the chart focused on the unit circle
            const double r_eff =
                std::min(radius, 1.0 + 50.0 / std::max(1.0, std::abs(cf.bstar())));
            const discwave::RootSet roots = discwave::roots_in_disk(cf, r_eff);
            std::ofstream out(dir / ("roots_" + std::to_string(i) + ".csv"));
            discwave::write_roots_csv(out, cf, roots);
        }

        discwave::VerifyTable table;
        const bool run_oracle = grid_m > 0;
        if (run_oracle) {
            std::vector<double> gains;
            for (const auto& gv : analysis->analysis.gain_verdicts) gains.push_back(gv.b);
            table = discwave::verify_oracle(analysis->wave, gains, grid_m, 5, 1e-2,
                                            analysis->wave.ode_options());
            std::ofstream out(dir / "verify.csv");
            discwave::write_verify_csv(out, table);
        }

        {
            const nlohmann::ordered_json j =
                discwave::verdict_json(analysis->analysis, analysis->wave, analysis->identity,
                                       run_oracle ? &table : nullptr);
            std::ofstream out(dir / "verdict.json");
            out << j.dump(2) << '\n';
            if (!out) throw Error(ErrorCode::internal, "verdict write failed");
        }

        if (run_oracle && !table.pass)
            throw Error(ErrorCode::verification,
                        "oracle mismatch: max relative error " + std::to_string(table.max_rel_err));
    });
}

dw_status dw_analysis_stabilizable(const dw_analysis* analysis, int* out) {
    return guarded([&] {
        require(analysis);
        if (out == nullptr) throw Error(ErrorCode::invalid_argument, "null output");
        *out = analysis->analysis.stabilizable ? 1 : 0;
    });
}

dw_status dw_analysis_gain_interval(const dw_analysis* analysis, double* b_lo, double* b_hi,
                                    int* empty, int* unbounded) {
    return guarded([&] {
        require(analysis);
        const discwave::GainInterval& gi = analysis->analysis.interval;
        if (b_lo != nullptr) *b_lo = gi.b_lo;
        if (b_hi != nullptr) *b_hi = gi.b_hi;
        if (empty != nullptr) *empty = gi.empty ? 1 : 0;
        if (unbounded != nullptr) *unbounded = gi.unbounded_below ? 1 : 0;
    });
}

dw_status dw_analysis_spectrum(const dw_analysis* analysis, double* re, double* im, int cap,
                               int* count) {
    return guarded([&] {
        require(analysis);
        const discwave::CVec& spec = analysis->analysis.tm.spectrum;
        if (count != nullptr) *count = static_cast<int>(spec.size());
        const int n = std::min<int>(cap, static_cast<int>(spec.size()));
        for (int i = 0; i < n; ++i) {
            if (re != nullptr) re[i] = spec[i].real();
            if (im != nullptr) im[i] = spec[i].imag();
        }
    });
}

dw_status dw_simulate(const dw_wave* wave, double gain, double amplitude, int periods,
                      const char* csv_path, double* dist_initial, double* dist_final) {
    return guarded([&] {
        require(wave);
        if (periods <= 0) throw Error(ErrorCode::invalid_argument, "periods must be positive");
        const DiscreteWave& w = wave->wave;
        const Vec dir = transverse_direction(w);
        const double theta = w.theta_h();
        const discwave::HistorySegment init = discwave::HistorySegment::sample(
            [&](double t) { return Vec(w.state(t) + amplitude * dir); }, theta, 256);

        const discwave::ControlledRun run = discwave::simulate_controlled(
            w.field(), w.sym().h, theta, gain, init, periods * w.period(), w.ode_options());

        if (dist_initial != nullptr)
            *dist_initial = discwave::distance_to_orbit(run.state(0.0), w);
        if (dist_final != nullptr)
            *dist_final = discwave::distance_to_orbit(run.state(run.t_end), w);
        if (csv_path != nullptr) {
            std::ofstream out(csv_path);
            if (!out)
                throw Error(ErrorCode::invalid_argument,
                            std::string("cannot open for writing: ") + csv_path);
            discwave::write_simulation_csv(out, run, w);
        }
    });
}

dw_status dw_region_chart(const dw_wave* wave, const char* out_dir) {
    return guarded([&] {
        if (out_dir == nullptr) throw Error(ErrorCode::invalid_argument, "null output directory");
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        {
            std::ofstream out(dir / "region.csv");
            if (!out)
                throw Error(ErrorCode::invalid_argument,
                            "cannot write region chart into " + std::string(out_dir));
            discwave::emit_region_chart(out);
        }
        if (wave != nullptr) {
            const discwave::TwistedMonodromy tm =
                discwave::twisted_monodromy(wave->wave, wave->wave.ode_options());
            double mu_star = 0.0;
            for (Eigen::Index i = 0; i < tm.spectrum.size(); ++i) {
                const Complex mu = tm.spectrum[i];
                if (std::abs(mu.imag()) > 1e-8 * std::max(1.0, std::abs(mu))) continue;
                if (mu.real() < -1.0 && mu.real() < mu_star) mu_star = mu.real();
            }
            if (mu_star < -1.0) {
                std::ofstream out(dir / "gain_path.csv");
                discwave::emit_gain_path(out, std::log(-mu_star), wave->wave.theta_h());
            }
        }
    });
}

dw_status dw_verify(const dw_wave* wave, const double* gains, int n_gains, int grid_m, double tol,
                    const char* csv_path, double* max_rel_err) {
    return guarded([&] {
        require(wave);
        if (gains == nullptr || n_gains <= 0)
            throw Error(ErrorCode::invalid_argument, "no gains to verify");
        if (grid_m < 8) throw Error(ErrorCode::invalid_argument, "grid_m must be at least 8");
        const double eff_tol = tol > 0.0 ? tol : 1e-2;
        const std::vector<double> gvec(gains, gains + n_gains);
        const discwave::VerifyTable table =
            discwave::verify_oracle(wave->wave, gvec, grid_m, 5, eff_tol, wave->wave.ode_options());
        if (csv_path != nullptr) {
            std::ofstream out(csv_path);
            if (!out)
                throw Error(ErrorCode::invalid_argument,
                            std::string("cannot open for writing: ") + csv_path);
            discwave::write_verify_csv(out, table);
        }
        if (max_rel_err != nullptr) *max_rel_err = table.max_rel_err;
        if (!table.pass)
            throw Error(ErrorCode::verification,
                        "oracle mismatch: max relative error " + std::to_string(table.max_rel_err));
    });
}

}  // extern "C"
