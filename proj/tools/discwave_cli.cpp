#include <dlfcn.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "discwave.h"

namespace {

int fail(dw_status st) {
    std::cerr << "error: " << dw_last_error() << '\n';
    return static_cast<int>(st);
}

int usage_error(const std::string& msg) {
    std::cerr << "error: " << msg << '\n';
    return 1;
}

// ---------------------------------------------------------------------------
// Config files: line-oriented key = value pairs grouped in [section] tables.
// '#' and ';' start comments. Vector and matrix values are whitespace or
// comma separated numbers (matrices row-major).

class Config {
  public:
    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config: " + path);
        Config cfg;
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find_first_of("#;");
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw std::runtime_error(where(path, lineno) + "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty())
                    throw std::runtime_error(where(path, lineno) + "empty section name");
                cfg.sections_[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error(where(path, lineno) + "expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw std::runtime_error(where(path, lineno) + "empty key");
            if (section.empty())
                throw std::runtime_error(where(path, lineno) + "key outside any section");
            cfg.sections_[section][key] = value;
        }
        return cfg;
    }

    bool has_section(const std::string& sec) const { return sections_.count(sec) != 0; }

    bool has(const std::string& sec, const std::string& key) const {
        const auto it = sections_.find(sec);
        return it != sections_.end() && it->second.count(key) != 0;
    }

    std::string get(const std::string& sec, const std::string& key) const {
        return sections_.at(sec).at(key);
    }

    std::string get_or(const std::string& sec, const std::string& key,
                       const std::string& fallback) const {
        return has(sec, key) ? get(sec, key) : fallback;
    }

    const std::map<std::string, std::string>& section(const std::string& sec) const {
        return sections_.at(sec);
    }

    void check_known(const std::string& sec, std::initializer_list<const char*> keys,
                     const char* prefix = nullptr) const {
        const auto it = sections_.find(sec);
        if (it == sections_.end()) return;
        for (const auto& [key, value] : it->second) {
            (void)value;
            bool known = false;
            for (const char* k : keys)
                if (key == k) known = true;
            if (prefix != nullptr && key.rfind(prefix, 0) == 0) known = true;
            if (!known) throw std::runtime_error("unknown config key [" + sec + "] " + key);
        }
    }

  private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    static std::string where(const std::string& path, int lineno) {
        return path + ":" + std::to_string(lineno) + ": ";
    }

    std::map<std::string, std::map<std::string, std::string>> sections_;
};

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
    std::string cleaned = text;
    for (char& c : cleaned)
        if (c == ',') c = ' ';
    std::istringstream in(cleaned);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (...) {
            pos = 0;
        }
        if (pos != tok.size()) throw std::runtime_error("cannot parse " + what + ": " + text);
        out.push_back(v);
    }
    return out;
}

double parse_number(const std::string& text, const std::string& what) {
    const std::vector<double> v = parse_numbers(text, what);
    if (v.size() != 1) throw std::runtime_error(what + " must be a single number");
    return v[0];
}

void validate_config(const Config& cfg) {
    cfg.check_known("system", {"kind", "name", "path"}, "param.");
    cfg.check_known("symmetry", {"h", "n", "m", "label"});
    cfg.check_known("guess", {"x", "theta"});
    cfg.check_known("tolerances", {"ode_tol", "shooting_tol", "max_iter", "eig_tol", "sep_floor"});
    cfg.check_known("gains", {"list", "cap"});
    cfg.check_known("output", {"dir"});
}

// ---------------------------------------------------------------------------
// System construction. Plugin handles stay open for the process lifetime
// because the field callbacks live inside them.

struct SystemHandle {
    dw_system* sys = nullptr;

    SystemHandle() = default;
    explicit SystemHandle(dw_system* s) : sys(s) {}
    SystemHandle(const SystemHandle&) = delete;
    SystemHandle& operator=(const SystemHandle&) = delete;
    SystemHandle(SystemHandle&& o) noexcept : sys(o.sys) { o.sys = nullptr; }
    SystemHandle& operator=(SystemHandle&& o) noexcept {
        std::swap(sys, o.sys);
        return *this;
    }
    ~SystemHandle() { dw_system_free(sys); }
};

std::string builtin_params_json(const Config& cfg) {
    nlohmann::json params = nlohmann::json::object();
    if (cfg.has_section("system")) {
        for (const auto& [key, value] : cfg.section("system")) {
            if (key.rfind("param.", 0) != 0) continue;
            params[key.substr(6)] = parse_number(value, "[system] " + key);
        }
    }
    return params.dump();
}

dw_status make_plugin_system(const std::string& path, const Config* cfg, SystemHandle* out,
                             std::string* err) {
    void* handle = dlopen(path.c_str(), RTLD_NOW | RTLD_LOCAL);
    if (handle == nullptr) {
        *err = std::string("cannot load plugin: ") + dlerror();
        return DW_ERR_USAGE;
    }
    const auto describe =
        reinterpret_cast<dw_describe_fn>(dlsym(handle, "discwave_describe_system"));
    if (describe == nullptr) {
        *err = "plugin does not export discwave_describe_system: " + path;
        return DW_ERR_USAGE;
    }
    dw_system_desc desc{};
    if (describe(&desc) != 0) {
        *err = "plugin refused to describe its system: " + path;
        return DW_ERR_USAGE;
    }

    std::vector<double> h_override, x_override;
    if (cfg != nullptr && cfg->has_section("symmetry")) {
        if (cfg->has("symmetry", "h")) {
            h_override = parse_numbers(cfg->get("symmetry", "h"), "[symmetry] h");
            if (static_cast<int>(h_override.size()) != desc.dim * desc.dim) {
                *err = "[symmetry] h must have dim*dim entries";
                return DW_ERR_USAGE;
            }
            desc.h_row_major = h_override.data();
        }
        if (cfg->has("symmetry", "n"))
            desc.n = static_cast<int>(parse_number(cfg->get("symmetry", "n"), "[symmetry] n"));
        if (cfg->has("symmetry", "m"))
            desc.m = static_cast<int>(parse_number(cfg->get("symmetry", "m"), "[symmetry] m"));
    }
    if (cfg != nullptr && cfg->has("guess", "x")) {
        x_override = parse_numbers(cfg->get("guess", "x"), "[guess] x");
        if (static_cast<int>(x_override.size()) != desc.dim) {
            *err = "[guess] x must have dim entries";
            return DW_ERR_USAGE;
        }
        desc.x_guess = x_override.data();
    }
    if (cfg != nullptr && cfg->has("guess", "theta"))
        desc.theta_guess = parse_number(cfg->get("guess", "theta"), "[guess] theta");

    dw_system* sys = nullptr;
    const dw_status st = dw_system_custom(&desc, &sys);
    if (st != DW_OK) {
        *err = dw_last_error();
        return st;
    }
    dw_system_set_origin(sys, "plugin", path.c_str());
    *out = SystemHandle(sys);
    return DW_OK;
}

// Builds the system a wave file was computed with, from the config when it
// names one, otherwise from the identity stored in the file.
int resolve_system(const Config* cfg, const std::string& wave_path, SystemHandle* out) {
    if (cfg != nullptr && cfg->has_section("system")) {
        const std::string kind = cfg->get_or("system", "kind", "builtin");
        if (kind == "builtin") {
            if (cfg->has_section("symmetry"))
                return usage_error("the symmetry of a builtin system is fixed");
            dw_system* sys = nullptr;
            const dw_status st = dw_system_builtin(cfg->get_or("system", "name", "").c_str(),
                                                   builtin_params_json(*cfg).c_str(), &sys);
            if (st != DW_OK) return fail(st);
            *out = SystemHandle(sys);
            return 0;
        }
        if (kind == "plugin") {
            if (!cfg->has("system", "path"))
                return usage_error("[system] path is required for kind = plugin");
            std::string err;
            const dw_status st = make_plugin_system(cfg->get("system", "path"), cfg, out, &err);
            if (st != DW_OK) return usage_error(err);
            return 0;
        }
        return usage_error("unknown [system] kind: " + kind);
    }

    if (wave_path.empty()) return usage_error("either --config with a [system] table or --wave is required");
    char kind[32] = {0}, name[128] = {0}, plugin_path[1024] = {0};
    char* params = nullptr;
    const dw_status st = dw_wave_peek_system(wave_path.c_str(), kind, sizeof kind, name,
                                             sizeof name, plugin_path, sizeof plugin_path, &params);
    if (st != DW_OK) return fail(st);
    const std::string params_json = params != nullptr ? params : "{}";
    dw_string_free(params);

    if (std::string(kind) == "builtin") {
        dw_system* sys = nullptr;
        const dw_status bst = dw_system_builtin(name, params_json.c_str(), &sys);
        if (bst != DW_OK) return fail(bst);
        *out = SystemHandle(sys);
        return 0;
    }
    if (std::string(kind) == "plugin") {
        std::string err;
        const dw_status pst = make_plugin_system(plugin_path, nullptr, out, &err);
        if (pst != DW_OK) return usage_error(err);
        return 0;
    }
    return usage_error("wave file was made with a custom system; pass --config describing it");
}

std::string shooting_opts_json(const Config* cfg) {
    nlohmann::json j = nlohmann::json::object();
    if (cfg != nullptr && cfg->has_section("tolerances")) {
        if (cfg->has("tolerances", "ode_tol"))
            j["ode_tol"] = parse_number(cfg->get("tolerances", "ode_tol"), "ode_tol");
        if (cfg->has("tolerances", "shooting_tol"))
            j["shooting_tol"] = parse_number(cfg->get("tolerances", "shooting_tol"), "shooting_tol");
        if (cfg->has("tolerances", "max_iter"))
            j["max_iter"] = static_cast<int>(parse_number(cfg->get("tolerances", "max_iter"), "max_iter"));
    }
    return j.dump();
}

std::string analyze_opts_json(const Config* cfg) {
    nlohmann::json j = nlohmann::json::object();
    if (cfg != nullptr) {
        if (cfg->has("tolerances", "ode_tol"))
            j["ode_tol"] = parse_number(cfg->get("tolerances", "ode_tol"), "ode_tol");
        if (cfg->has("tolerances", "eig_tol"))
            j["eig_tol"] = parse_number(cfg->get("tolerances", "eig_tol"), "eig_tol");
        if (cfg->has("tolerances", "sep_floor"))
            j["sep_floor"] = parse_number(cfg->get("tolerances", "sep_floor"), "sep_floor");
        if (cfg->has("gains", "list")) j["gains"] = parse_numbers(cfg->get("gains", "list"), "gains");
        if (cfg->has("gains", "cap")) j["gain_cap"] = parse_number(cfg->get("gains", "cap"), "cap");
    }
    return j.dump();
}

std::filesystem::path ensure_out_dir(const std::string& flag, const Config* cfg) {
    std::string dir = flag;
    if (dir.empty() && cfg != nullptr && cfg->has("output", "dir")) dir = cfg->get("output", "dir");
    if (dir.empty()) dir = ".";
    std::filesystem::create_directories(dir);
    return dir;
}

struct WaveHandle {
    dw_wave* wave = nullptr;
    ~WaveHandle() { dw_wave_free(wave); }
};

struct AnalysisHandle {
    dw_analysis* analysis = nullptr;
    ~AnalysisHandle() { dw_analysis_free(analysis); }
};

int probe_equivariance(const dw_system* sys, unsigned long seed) {
    double resid = 0.0;
    const dw_status st = dw_system_equivariance(sys, seed, 16, &resid);
    if (st != DW_OK) return fail(st);
    std::cout << "equivariance_residual = " << resid << '\n';
    if (resid > 1e-6) return usage_error("vector field is not equivariant under h");
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_find_orbit(const std::string& config_path, const std::string& out_flag,
                   unsigned long seed) {
    Config cfg = Config::parse_file(config_path);
    validate_config(cfg);
    SystemHandle sys;
    if (const int rc = resolve_system(&cfg, "", &sys); rc != 0) return rc;
    if (const int rc = probe_equivariance(sys.sys, seed); rc != 0) return rc;

    std::vector<double> x_guess;
    double theta_guess = 0.0;
    const bool builtin_kind = cfg.get_or("system", "kind", "builtin") == "builtin";
    if (builtin_kind && cfg.has("guess", "x")) {
        x_guess = parse_numbers(cfg.get("guess", "x"), "[guess] x");
        if (static_cast<int>(x_guess.size()) != dw_system_dim(sys.sys))
            return usage_error("[guess] x must have dim entries");
    }
    if (builtin_kind && cfg.has("guess", "theta"))
        theta_guess = parse_number(cfg.get("guess", "theta"), "[guess] theta");

    WaveHandle w;
    const dw_status st =
        dw_find_wave(sys.sys, x_guess.empty() ? nullptr : x_guess.data(), theta_guess,
                     shooting_opts_json(&cfg).c_str(), &w.wave);
    if (st != DW_OK) return fail(st);

    const std::filesystem::path out = ensure_out_dir(out_flag, &cfg);
    const std::string wave_path = (out / "wave.json").string();
    if (const dw_status s = dw_wave_save(w.wave, wave_path.c_str()); s != DW_OK) return fail(s);
    if (const dw_status s =
            dw_wave_write_trajectory(w.wave, (out / "trajectory.csv").string().c_str(), 1000);
        s != DW_OK)
        return fail(s);

    const int dim = dw_system_dim(sys.sys);
    std::vector<double> anchor(static_cast<std::size_t>(dim));
    double period = 0.0, theta = 0.0, resid = 0.0;
    dw_wave_info(w.wave, anchor.data(), &period, &theta, &resid);
    std::cout << std::setprecision(12);
    std::cout << "system = " << dw_system_name(sys.sys) << '\n';
    std::cout << "anchor =";
    for (const double v : anchor) std::cout << ' ' << v;
    std::cout << '\n';
    std::cout << "period = " << period << '\n';
    std::cout << "theta_h = " << theta << '\n';
    std::cout << "shooting_residual = " << resid << '\n';
    std::cout << "wave_file = " << wave_path << '\n';
    return 0;
}

int cmd_analyze(const std::string& wave_path, const std::string& config_path,
                const std::string& out_flag, int grid_m, unsigned long seed) {
    Config cfg;
    const bool have_cfg = !config_path.empty();
    if (have_cfg) {
        cfg = Config::parse_file(config_path);
        validate_config(cfg);
    }
    SystemHandle sys;
    if (const int rc = resolve_system(have_cfg ? &cfg : nullptr, wave_path, &sys); rc != 0)
        return rc;
    if (const int rc = probe_equivariance(sys.sys, seed); rc != 0) return rc;

    WaveHandle w;
    if (const dw_status s = dw_wave_load(sys.sys, wave_path.c_str(), &w.wave); s != DW_OK)
        return fail(s);

    AnalysisHandle a;
    if (const dw_status s =
            dw_analyze(w.wave, analyze_opts_json(have_cfg ? &cfg : nullptr).c_str(), &a.analysis);
        s != DW_OK)
        return fail(s);

    const std::filesystem::path out = ensure_out_dir(out_flag, have_cfg ? &cfg : nullptr);
    const dw_status art =
        dw_analysis_write_artifacts(a.analysis, out.string().c_str(), grid_m, 2.0);
    if (art != DW_OK && art != DW_ERR_VERIFY) return fail(art);

    char* json_text = nullptr;
    if (const dw_status s = dw_analysis_json(a.analysis, &json_text); s != DW_OK) return fail(s);
    const nlohmann::json verdict = nlohmann::json::parse(json_text);
    dw_string_free(json_text);

    std::cout << std::setprecision(12);
    std::cout << "stabilizable = " << (verdict["stabilizable"].get<bool>() ? "yes" : "no") << '\n';
    const auto& gi = verdict["gain_interval"];
    if (!gi["empty"].get<bool>()) {
        std::cout << "gain_interval = (" << gi["b_lo"].get<double>() << ", "
                  << gi["b_hi"].get<double>() << ")";
        if (gi["unbounded_below"].get<bool>()) std::cout << "  # lower end capped";
        std::cout << '\n';
    } else {
        std::cout << "gain_interval = empty\n";
        std::cout << "reason = " << gi["reason"].get<std::string>() << '\n';
    }
    const std::string diagnosis = verdict["hypotheses"]["diagnosis"].get<std::string>();
    if (!diagnosis.empty()) std::cout << "diagnosis = " << diagnosis << '\n';
    std::cout << "report = " << (out / "verdict.json").string() << '\n';

    if (art == DW_ERR_VERIFY) return fail(art);
    return 0;
}

int cmd_simulate(const std::string& wave_path, const std::string& config_path, double gain,
                 double amplitude, int periods, const std::string& out_flag) {
    Config cfg;
    const bool have_cfg = !config_path.empty();
    if (have_cfg) {
        cfg = Config::parse_file(config_path);
        validate_config(cfg);
    }
    SystemHandle sys;
    if (const int rc = resolve_system(have_cfg ? &cfg : nullptr, wave_path, &sys); rc != 0)
        return rc;
    WaveHandle w;
    if (const dw_status s = dw_wave_load(sys.sys, wave_path.c_str(), &w.wave); s != DW_OK)
        return fail(s);

    const std::filesystem::path out = ensure_out_dir(out_flag, have_cfg ? &cfg : nullptr);
    const std::string csv = (out / "simulation.csv").string();
    double d0 = 0.0, d1 = 0.0;
    const dw_status s = dw_simulate(w.wave, gain, amplitude, periods, csv.c_str(), &d0, &d1);
    if (s != DW_OK) return fail(s);

    std::cout << std::setprecision(12);
    std::cout << "gain = " << gain << '\n';
    std::cout << "periods = " << periods << '\n';
    std::cout << "dist_initial = " << d0 << '\n';
    std::cout << "dist_final = " << d1 << '\n';
    std::cout << "decay_factor = " << (d1 > 0.0 ? d0 / d1 : std::numeric_limits<double>::infinity())
              << '\n';
    std::cout << "csv = " << csv << '\n';
    return 0;
}

int cmd_region(const std::string& wave_path, const std::string& config_path,
               const std::string& out_flag) {
    Config cfg;
    const bool have_cfg = !config_path.empty();
    if (have_cfg) {
        cfg = Config::parse_file(config_path);
        validate_config(cfg);
    }
    const std::filesystem::path out = ensure_out_dir(out_flag, have_cfg ? &cfg : nullptr);

    WaveHandle w;
    SystemHandle sys;
    if (!wave_path.empty()) {
        if (const int rc = resolve_system(have_cfg ? &cfg : nullptr, wave_path, &sys); rc != 0)
            return rc;
        if (const dw_status s = dw_wave_load(sys.sys, wave_path.c_str(), &w.wave); s != DW_OK)
            return fail(s);
    }
    const dw_status s = dw_region_chart(w.wave, out.string().c_str());
    if (s != DW_OK) return fail(s);
    std::cout << "region_csv = " << (out / "region.csv").string() << '\n';
    if (w.wave != nullptr)
        std::cout << "gain_path_csv = " << (out / "gain_path.csv").string() << '\n';
    return 0;
}

int cmd_verify(const std::string& wave_path, const std::string& config_path,
               std::vector<double> gains, int grid_m, const std::string& out_flag) {
    Config cfg;
    const bool have_cfg = !config_path.empty();
    if (have_cfg) {
        cfg = Config::parse_file(config_path);
        validate_config(cfg);
        if (gains.empty() && cfg.has("gains", "list"))
            gains = parse_numbers(cfg.get("gains", "list"), "gains");
    }
    if (gains.empty()) gains.push_back(0.0);

    SystemHandle sys;
    if (const int rc = resolve_system(have_cfg ? &cfg : nullptr, wave_path, &sys); rc != 0)
        return rc;
    WaveHandle w;
    if (const dw_status s = dw_wave_load(sys.sys, wave_path.c_str(), &w.wave); s != DW_OK)
        return fail(s);

    const std::filesystem::path out = ensure_out_dir(out_flag, have_cfg ? &cfg : nullptr);
    const std::string csv = (out / "verify.csv").string();
    double max_rel = 0.0;
    const dw_status s = dw_verify(w.wave, gains.data(), static_cast<int>(gains.size()), grid_m,
                                  0.0, csv.c_str(), &max_rel);
    std::cout << std::setprecision(12);
    std::cout << "grid_m = " << grid_m << '\n';
    std::cout << "max_rel_err = " << max_rel << '\n';
    std::cout << "csv = " << csv << '\n';
    if (s != DW_OK) return fail(s);
    std::cout << "verdict = pass\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equivariant delayed-feedback stabilization of discrete waves"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(dw_version()));

    std::string config_path, wave_path, out_dir;
    unsigned long seed = 0;
    int grid_m = 200;
    double gain = 0.0, amplitude = 1e-3;
    int periods = 20;
    std::vector<double> gains;

    CLI::App* find = app.add_subcommand("find-orbit", "Locate a discrete wave by Newton shooting");
    find->add_option("--config", config_path, "Config file")->required();
    find->add_option("--out", out_dir, "Output directory");
    find->add_option("--seed", seed, "Seed for the equivariance probe");

    CLI::App* analyze = app.add_subcommand("analyze", "Spectrum, hypotheses and gain interval");
    analyze->add_option("--wave", wave_path, "Wave file")->required();
    analyze->add_option("--config", config_path, "Config file");
    analyze->add_option("--out", out_dir, "Output directory");
    analyze->add_option("--grid-m", grid_m, "Run the discretized-operator cross-check at this grid")
        ->default_val(0);
    analyze->add_option("--seed", seed, "Seed for the equivariance probe");

    CLI::App* simulate = app.add_subcommand("simulate", "Integrate the controlled system");
    simulate->add_option("--wave", wave_path, "Wave file")->required();
    simulate->add_option("--config", config_path, "Config file");
    simulate->add_option("--gain", gain, "Feedback gain b")->required();
    simulate->add_option("--amplitude", amplitude, "Initial transverse perturbation size");
    simulate->add_option("--periods", periods, "Duration in periods");
    simulate->add_option("--out", out_dir, "Output directory");

    CLI::App* region = app.add_subcommand("region", "Emit the stability region chart");
    region->add_option("--wave", wave_path, "Wave file (adds the gain path)");
    region->add_option("--config", config_path, "Config file");
    region->add_option("--out", out_dir, "Output directory");

    CLI::App* verify = app.add_subcommand("verify", "Discretized-operator cross-check");
    verify->add_option("--wave", wave_path, "Wave file")->required();
    verify->add_option("--config", config_path, "Config file");
    verify->add_option("--gain", gains, "Gain to check (repeatable)");
    verify->add_option("--grid-m", grid_m, "Discretization grid size");
    verify->add_option("--out", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(find)) return cmd_find_orbit(config_path, out_dir, seed);
        if (app.got_subcommand(analyze))
            return cmd_analyze(wave_path, config_path, out_dir, grid_m, seed);
        if (app.got_subcommand(simulate))
            return cmd_simulate(wave_path, config_path, gain, amplitude, periods, out_dir);
        if (app.got_subcommand(region)) return cmd_region(wave_path, config_path, out_dir);
        if (app.got_subcommand(verify))
            return cmd_verify(wave_path, config_path, gains, grid_m, out_dir);
    } catch (const std::exception& e) {
        return usage_error(e.what());
    }
    return usage_error("no subcommand");
}
