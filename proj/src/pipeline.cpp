#include "discwave/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace discwave {

Analysis analyze_wave(const DiscreteWave& wave, const AnalyzeOptions& opts) {
    Analysis a;
    a.tm = twisted_monodromy(wave, opts.ode);
    a.hypotheses = check_hypotheses(a.tm, opts.tols);
    a.interval = gain_interval_combined(a.tm, wave.theta_h(), opts.tols, opts.gain_cap);
    a.pattern_residual = pattern_residual(wave, wave.sym(), opts.pattern_probes);
    a.power_identity_residual = verify_power_identity(wave, a.tm, opts.ode);
    a.liouville_residual = liouville_residual(wave, a.tm, opts.ode);
    a.stabilizable = a.hypotheses.pass() && !a.interval.empty;

    std::vector<double> gains = opts.gain_samples;
    if (gains.empty()) {
        gains.push_back(0.0);
        if (!a.interval.empty) gains.push_back(0.5 * (a.interval.b_lo + a.interval.b_hi));
    }
    for (const double b : gains) {
        GainVerdict gv;
        gv.b = b;
        gv.verdict =
            unit_disk_verdict(CharFunction::from_monodromy(a.tm, b, wave.theta_h()));
        a.gain_verdicts.push_back(std::move(gv));
    }
    return a;
}

namespace {

std::vector<Complex> top_by_modulus(const CVec& eigs, int k) {
    std::vector<Complex> sorted(eigs.data(), eigs.data() + eigs.size());
    std::sort(sorted.begin(), sorted.end(), [](Complex a, Complex b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    if (static_cast<int>(sorted.size()) > k) sorted.resize(k);
    return sorted;
}

// Greedy nearest-match pairing. Both spectra are conjugation-closed, so a
// pool entry may stand in for its conjugate twin; that keeps the match
// stable when a top-k cut or a sort tie splits a conjugate pair.
std::vector<Complex> pair_nearest(const std::vector<Complex>& ref,
                                  const std::vector<Complex>& pool) {
    std::vector<char> used(pool.size(), 0);
    std::vector<Complex> out(ref.size(), Complex(0.0));
    for (std::size_t r = 0; r < ref.size(); ++r) {
        std::size_t best = pool.size();
        double best_d = 0.0;
        bool best_conj = false;
        for (std::size_t j = 0; j < pool.size(); ++j) {
            if (used[j]) continue;
            const double d_plain = std::abs(pool[j] - ref[r]);
            const double d_conj = std::abs(std::conj(pool[j]) - ref[r]);
            const double d = std::min(d_plain, d_conj);
            if (best == pool.size() || d < best_d) {
                best = j;
                best_d = d;
                best_conj = d_conj < d_plain;
            }
        }
        if (best == pool.size()) break;
        used[best] = 1;
        out[r] = best_conj ? std::conj(pool[best]) : pool[best];
    }
    return out;
}

}  // namespace

VerifyTable verify_oracle(const DiscreteWave& wave, const std::vector<double>& gains, int grid_m,
                          int top_k, double tol, const OdeOptions& ode) {
    VerifyTable table;
    table.grid_m = grid_m;
    const TwistedMonodromy tm = twisted_monodromy(wave, ode);

    for (const double b : gains) {
        const CharFunction cf = CharFunction::from_monodromy(tm, b, wave.theta_h());
        const std::vector<Complex> small = smallest_roots(cf, top_k);
        std::vector<Complex> predicted;
        for (const Complex z : small) {
            const Complex mu = 1.0 / z;
            if (std::abs(mu) > 1e-6) predicted.push_back(mu);
        }
        std::sort(predicted.begin(), predicted.end(), [](Complex a, Complex b) {
            if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
            if (a.real() != b.real()) return a.real() > b.real();
            return a.imag() > b.imag();
        });

        const DiscretizedOperator op = linearized_step_operator(wave, b, grid_m, ode);
        const std::vector<Complex> oracle = pair_nearest(
            predicted, top_by_modulus(oracle_spectrum(op, top_k), static_cast<int>(predicted.size())));

        for (std::size_t r = 0; r < predicted.size(); ++r) {
            VerifyRow row;
            row.b = b;
            row.k = static_cast<int>(r);
            row.predicted = predicted[r];
            row.oracle = oracle[r];
            row.rel_err = std::abs(row.oracle - row.predicted) / std::abs(row.predicted);
            table.max_rel_err = std::max(table.max_rel_err, row.rel_err);
            table.rows.push_back(row);
        }
    }
    table.pass = table.max_rel_err <= tol;
    return table;
}

DriftCheck oracle_drift(const DiscreteWave& wave, double b, int m, int top_k,
                        const OdeOptions& ode) {
    if (m < 4 || m % 2 != 0) throw Error(ErrorCode::invalid_argument, "drift check needs even m >= 4");
    DriftCheck dc;
    dc.m = m;
    std::vector<std::vector<Complex>> tops;
    for (const int grid : {m / 2, m, 2 * m}) {
        const DiscretizedOperator op = linearized_step_operator(wave, b, grid, ode);
        tops.push_back(top_by_modulus(oracle_spectrum(op, top_k), top_k));
    }
    tops[1] = pair_nearest(tops[0], tops[1]);
    tops[2] = pair_nearest(tops[1], tops[2]);
    for (int r = 0; r < top_k; ++r) {
        dc.drift_coarse = std::max(dc.drift_coarse, std::abs(tops[0][r] - tops[1][r]));
        dc.drift_fine = std::max(dc.drift_fine, std::abs(tops[1][r] - tops[2][r]));
    }
    dc.ratio = dc.drift_coarse / std::max(dc.drift_fine, 1e-300);
    return dc;
}

}  // namespace discwave
