#include "discwave/report.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

namespace discwave {

namespace {

using nlohmann::ordered_json;

constexpr const char* kWaveFormat = "discwave-wave";
constexpr const char* kVerdictFormat = "discwave-verdict";
constexpr int kFormatVersion = 1;

ordered_json vec_json(const Vec& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vec json_vec(const ordered_json& a) {
    Vec v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

ordered_json mat_json(const Mat& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat json_mat(const ordered_json& rows) {
    const auto nr = static_cast<Eigen::Index>(rows.size());
    if (nr == 0) return Mat();
    const auto nc = static_cast<Eigen::Index>(rows[0].size());
    Mat m(nr, nc);
    for (Eigen::Index i = 0; i < nr; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != nc)
            throw Error(ErrorCode::invalid_argument, "ragged matrix in wave file");
        for (Eigen::Index j = 0; j < nc; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

ordered_json complex_json(Complex z) {
    return ordered_json{{"re", z.real()}, {"im", z.imag()}};
}

ordered_json identity_json(const SystemIdentity& id) {
    ordered_json j;
    j["kind"] = id.kind;
    j["name"] = id.name;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : id.params) params[k] = v;
    j["params"] = std::move(params);
    if (!id.plugin_path.empty()) j["plugin_path"] = id.plugin_path;
    return j;
}

SystemIdentity json_identity(const ordered_json& j) {
    SystemIdentity id;
    id.kind = j.at("kind").get<std::string>();
    id.name = j.at("name").get<std::string>();
    if (j.contains("params"))
        for (const auto& [k, v] : j.at("params").items()) id.params[k] = v.get<double>();
    if (j.contains("plugin_path")) id.plugin_path = j.at("plugin_path").get<std::string>();
    return id;
}

}  // namespace

void save_wave(const std::string& path, const DiscreteWave& wave, const SystemIdentity& identity) {
    const SpatioTemporalSymmetry& sym = wave.sym();
    ordered_json j;
    j["format"] = kWaveFormat;
    j["version"] = kFormatVersion;
    j["system"] = identity_json(identity);
    j["symmetry"] = ordered_json{{"h", mat_json(sym.h.matrix)},
                                 {"h_label", sym.h.label},
                                 {"n", sym.n},
                                 {"m", sym.m}};
    j["wave"] = ordered_json{{"anchor", vec_json(wave.anchor())},
                             {"theta_h", wave.theta_h()},
                             {"period", wave.period()},
                             {"shooting_residual", wave.shooting_residual()}};
    const OdeOptions& ode = wave.ode_options();
    j["ode"] = ordered_json{{"rtol", ode.rtol},
                            {"atol", ode.atol},
                            {"max_step", ode.max_step},
                            {"max_steps", ode.max_steps}};
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::invalid_argument, "cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::internal, "write failed: " + path);
}

WaveFile load_wave_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot open wave file: " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string("wave file parse error: ") + e.what());
    }
    if (j.value("format", "") != kWaveFormat)
        throw Error(ErrorCode::invalid_argument, "not a wave file: " + path);
    if (j.value("version", 0) != kFormatVersion)
        throw Error(ErrorCode::invalid_argument, "unsupported wave file version");

    WaveFile wf;
    wf.identity = json_identity(j.at("system"));
    const auto& sj = j.at("symmetry");
    wf.h_matrix = json_mat(sj.at("h"));
    wf.h_label = sj.value("h_label", "");
    wf.n = sj.at("n").get<int>();
    wf.m = sj.at("m").get<int>();
    const auto& wj = j.at("wave");
    wf.anchor = json_vec(wj.at("anchor"));
    wf.theta_h = wj.at("theta_h").get<double>();
    wf.period = wj.at("period").get<double>();
    wf.shooting_residual = wj.value("shooting_residual", 0.0);
    if (j.contains("ode")) {
        const auto& oj = j.at("ode");
        wf.ode.rtol = oj.value("rtol", wf.ode.rtol);
        wf.ode.atol = oj.value("atol", wf.ode.atol);
        wf.ode.max_step = oj.value("max_step", wf.ode.max_step);
        wf.ode.max_steps = oj.value("max_steps", wf.ode.max_steps);
    }
    return wf;
}

DiscreteWave rebind_wave(const VectorField& field, const WaveFile& wf) {
    if (field.dim() != wf.anchor.size())
        throw Error(ErrorCode::invalid_argument, "wave file dimension does not match the system");
    SpatioTemporalSymmetry sym;
    sym.h = GroupElement{wf.h_matrix, wf.h_label, wf.n};
    sym.theta_h = wf.theta_h;
    sym.n = wf.n;
    sym.m = wf.m;
    sym.period = wf.period;
    sym.validate();

    Trajectory traj = integrate(field, wf.anchor, 0.0, wf.period, wf.ode);
    DiscreteWave wave(field, sym, wf.anchor, std::move(traj), wf.shooting_residual, wf.ode);
    std::vector<std::pair<int, double>> probe;
    for (int k = 2; k <= 6; ++k)
        probe.emplace_back(k, (wave.trajectory().eval(wf.period / k) - wf.anchor).norm());
    wave.set_minimality_probe(std::move(probe));
    return wave;
}

nlohmann::ordered_json verdict_json(const Analysis& analysis, const DiscreteWave& wave,
                                    const SystemIdentity& identity,
                                    const VerifyTable* oracle_check) {
    ordered_json j;
    j["format"] = kVerdictFormat;
    j["version"] = kFormatVersion;
    j["system"] = identity_json(identity);

    ordered_json wj;
    wj["dim"] = wave.field().dim();
    wj["anchor"] = vec_json(wave.anchor());
    wj["period"] = wave.period();
    wj["theta_h"] = wave.theta_h();
    wj["n"] = wave.sym().n;
    wj["m"] = wave.sym().m;
    wj["h_label"] = wave.sym().h.label;
    wj["shooting_residual"] = wave.shooting_residual();
    wj["pattern_residual"] = analysis.pattern_residual;
    ordered_json probes = ordered_json::array();
    for (const auto& [k, dist] : wave.minimality_probe())
        probes.push_back(ordered_json{{"k", k}, {"closure_dist", dist}});
    wj["minimality_probe"] = std::move(probes);
    wj["power_identity_residual"] = analysis.power_identity_residual;
    wj["liouville_residual"] = analysis.liouville_residual;
    j["wave"] = std::move(wj);

    std::vector<Eigen::Index> order(analysis.tm.spectrum.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(analysis.tm.spectrum[a]) > std::abs(analysis.tm.spectrum[b]);
    });
    ordered_json spec = ordered_json::array();
    for (const Eigen::Index i : order) {
        const Complex mu = analysis.tm.spectrum[i];
        ordered_json e = complex_json(mu);
        e["abs"] = std::abs(mu);
        e["is_trivial"] = (static_cast<int>(i) == analysis.tm.trivial_index);
        spec.push_back(std::move(e));
    }
    j["spectrum"] = std::move(spec);
    j["spectrum_backward_error"] = analysis.tm.backward_error;

    const HypothesisReport& hr = analysis.hypotheses;
    ordered_json hj;
    hj["trivial_simple"] = hr.trivial_simple;
    hj["unit_circle_clear"] = hr.unit_circle_clear;
    ordered_json uj = ordered_json::array();
    for (const Complex mu : hr.unstable) uj.push_back(complex_json(mu));
    hj["unstable"] = std::move(uj);
    hj["all_in_window"] = hr.all_in_window;
    hj["window_margin"] = hr.margin;
    hj["pass"] = hr.pass();
    hj["diagnosis"] = hr.diagnosis;
    j["hypotheses"] = std::move(hj);

    const GainInterval& gi = analysis.interval;
    ordered_json gj;
    gj["empty"] = gi.empty;
    if (!gi.empty) {
        gj["b_lo"] = gi.b_lo;
        gj["b_hi"] = gi.b_hi;
        gj["unbounded_below"] = gi.unbounded_below;
        gj["binding_mu"] = complex_json(gi.binding_mu);
    }
    gj["reason"] = gi.reason;
    ordered_json per = ordered_json::array();
    for (const PerEigInterval& pe : gi.per_eig) {
        ordered_json e;
        e["mu"] = complex_json(pe.mu);
        e["empty"] = pe.empty;
        if (!pe.empty) {
            e["b_lo"] = pe.b_lo;
            e["b_hi"] = pe.b_hi;
        }
        if (!pe.reason.empty()) e["reason"] = pe.reason;
        per.push_back(std::move(e));
    }
    gj["per_eigenvalue"] = std::move(per);
    j["gain_interval"] = std::move(gj);

    ordered_json gains = ordered_json::array();
    for (const GainVerdict& gv : analysis.gain_verdicts) {
        ordered_json e;
        e["b"] = gv.b;
        e["stable"] = gv.verdict.stable;
        e["roots_on_or_inside"] = gv.verdict.roots_on_or_inside;
        e["unit_root_present"] = gv.verdict.unit_root_present;
        e["unit_root_simple"] = gv.verdict.unit_root_simple;
        ordered_json off = ordered_json::array();
        for (const Complex z : gv.verdict.offending) {
            ordered_json o = complex_json(z);
            o["abs"] = std::abs(z);
            off.push_back(std::move(o));
        }
        e["offending_roots"] = std::move(off);
        gains.push_back(std::move(e));
    }
    j["gain_verdicts"] = std::move(gains);

    if (oracle_check != nullptr) {
        ordered_json oc;
        oc["run"] = true;
        oc["grid_m"] = oracle_check->grid_m;
        oc["max_rel_err"] = oracle_check->max_rel_err;
        oc["pass"] = oracle_check->pass;
        ordered_json rows = ordered_json::array();
        for (const VerifyRow& r : oracle_check->rows) {
            rows.push_back(ordered_json{{"b", r.b},
                                        {"k", r.k},
                                        {"oracle", complex_json(r.oracle)},
                                        {"predicted", complex_json(r.predicted)},
                                        {"rel_err", r.rel_err}});
        }
        oc["rows"] = std::move(rows);
        j["oracle_check"] = std::move(oc);
    } else {
        j["oracle_check"] = ordered_json{{"run", false}};
    }

    j["stabilizable"] = analysis.stabilizable;
    return j;
}

namespace {

std::ostream& csv_stream(std::ostream& out) {
    out << std::setprecision(17);
    return out;
}

void sort_desc_modulus(std::vector<Complex>& v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const DiscreteWave& wave, int samples) {
    csv_stream(out) << "t";
    for (int i = 1; i <= wave.field().dim(); ++i) out << ",x" << i;
    out << '\n';
    for (int k = 0; k <= samples; ++k) {
        const double t = wave.period() * k / samples;
        const Vec x = wave.trajectory().eval(std::min(t, wave.period()));
        out << t;
        for (Eigen::Index i = 0; i < x.size(); ++i) out << ',' << x[i];
        out << '\n';
    }
}

void write_spectrum_csv(std::ostream& out, const CVec& spectrum) {
    std::vector<Complex> mus(spectrum.data(), spectrum.data() + spectrum.size());
    sort_desc_modulus(mus);
    csv_stream(out) << "re_mu,im_mu,abs_mu\n";
    for (const Complex mu : mus)
        out << mu.real() << ',' << mu.imag() << ',' << std::abs(mu) << '\n';
}

void write_roots_csv(std::ostream& out, const CharFunction& cf, const RootSet& roots) {
    csv_stream(out) << "re_z,im_z,multiplicity,abs_d\n";
    for (std::size_t i = 0; i < roots.roots.size(); ++i) {
        const Complex z = roots.roots[i];
        const double resid =
            i < roots.residuals.size() ? roots.residuals[i] : std::abs(eval_d(cf, z));
        out << z.real() << ',' << z.imag() << ',' << roots.multiplicity[i] << ',' << resid << '\n';
    }
}

void write_simulation_csv(std::ostream& out, const ControlledRun& run, const DiscreteWave& wave) {
    const int dim = wave.field().dim();
    csv_stream(out) << "t";
    for (int i = 1; i <= dim; ++i) out << ",x" << i;
    out << ",control_norm,dist_to_orbit\n";
    for (const SimSample& s : run.samples) {
        out << s.t;
        for (Eigen::Index i = 0; i < s.x.size(); ++i) out << ',' << s.x[i];
        out << ',' << s.control_norm << ',' << distance_to_orbit(s.x, wave) << '\n';
    }
}

void write_verify_csv(std::ostream& out, const VerifyTable& table) {
    csv_stream(out) << "b,k,re_oracle,im_oracle,re_predicted,im_predicted,rel_err\n";
    for (const VerifyRow& r : table.rows) {
        out << r.b << ',' << r.k << ',' << r.oracle.real() << ',' << r.oracle.imag() << ','
            << r.predicted.real() << ',' << r.predicted.imag() << ',' << r.rel_err << '\n';
    }
}

}  // namespace discwave
