#include "discwave/systems.hpp"

#include <cmath>

namespace discwave {

namespace {

std::map<std::string, double> merge_params(std::map<std::string, double> defaults,
                                           const std::map<std::string, double>& overrides,
                                           const std::string& name) {
    for (const auto& [key, value] : overrides) {
        const auto it = defaults.find(key);
        if (it == defaults.end())
            throw Error(ErrorCode::invalid_argument,
                        "unknown parameter '" + key + "' for system '" + name + "'");
        it->second = value;
    }
    return defaults;
}

// Planar limit cycle x^2 + y^2 = 1 with rotation rate 1, an uncoupled
// transverse direction w' = w (a - w^2), and the point symmetry given by
// h_w = +-1 on the w axis (always -1 on the plane).
SystemDef make_oscillator(const std::string& name, double default_w_coeff, double h_w,
                          const std::map<std::string, double>& overrides) {
    SystemDef def;
    def.name = name;
    def.params = merge_params({{"w_coeff", default_w_coeff}}, overrides, name);
    const double a = def.params.at("w_coeff");
    def.field = VectorField(
        3,
        [a](const Vec& x) {
            const double r2 = x[0] * x[0] + x[1] * x[1];
            Vec f(3);
            f[0] = x[0] * (1.0 - r2) - x[1];
            f[1] = x[1] * (1.0 - r2) + x[0];
            f[2] = x[2] * (a - x[2] * x[2]);
            return f;
        },
        [a](const Vec& x) {
            const double r2 = x[0] * x[0] + x[1] * x[1];
            Mat j = Mat::Zero(3, 3);
            j(0, 0) = 1.0 - r2 - 2.0 * x[0] * x[0];
            j(0, 1) = -2.0 * x[0] * x[1] - 1.0;
            j(1, 0) = -2.0 * x[0] * x[1] + 1.0;
            j(1, 1) = 1.0 - r2 - 2.0 * x[1] * x[1];
            j(2, 2) = a - 3.0 * x[2] * x[2];
            return j;
        });
    def.h.matrix = Mat::Identity(3, 3);
    def.h.matrix(0, 0) = -1.0;
    def.h.matrix(1, 1) = -1.0;
    def.h.matrix(2, 2) = h_w;
    def.h.label = (h_w < 0.0) ? "-I" : "diag(-1,-1,1)";
    def.h.declared_order = 2;
    def.n = 2;
    def.m = 1;
    def.x_guess = Vec(3);
    def.x_guess << 1.1, 0.0, 0.05;
    def.theta_guess = 3.0;
    return def;
}

SystemDef make_lorenz(const std::map<std::string, double>& overrides) {
    SystemDef def;
    def.name = "lorenz";
    def.params =
        merge_params({{"sigma", 10.0}, {"eps", 8.0 / 3.0}, {"lambda", 312.0}}, overrides,
                     "lorenz");
    const double sigma = def.params.at("sigma");
    const double eps = def.params.at("eps");
    const double lambda = def.params.at("lambda");
    def.field = VectorField(
        3,
        [sigma, eps, lambda](const Vec& x) {
            Vec f(3);
            f[0] = sigma * (x[1] - x[0]);
            f[1] = lambda * x[0] - x[1] - x[0] * x[2];
            f[2] = -eps * x[2] + x[0] * x[1];
            return f;
        },
        [sigma, eps, lambda](const Vec& x) {
            Mat j(3, 3);
            j << -sigma, sigma, 0.0, lambda - x[2], -1.0, -x[0], x[1], x[0], -eps;
            return j;
        });
    def.h.matrix = Mat::Identity(3, 3);
    def.h.matrix(0, 0) = -1.0;
    def.h.matrix(1, 1) = -1.0;
    def.h.label = "diag(-1,-1,1)";
    def.h.declared_order = 2;
    def.n = 2;
    def.m = 1;
    def.x_guess = Vec(3);
    def.x_guess << 0.0, 37.12667530, 264.02921981;
    def.theta_guess = 0.2059085763;
    return def;
}

}  // namespace

std::vector<std::string> builtin_names() {
    return {"twisted_oscillator", "lorenz", "positive_unstable", "stable_oscillator"};
}

SystemDef make_builtin(const std::string& name,
                       const std::map<std::string, double>& overrides) {
    if (name == "twisted_oscillator") return make_oscillator(name, 0.5, -1.0, overrides);
    if (name == "positive_unstable") return make_oscillator(name, 0.35, 1.0, overrides);
    if (name == "stable_oscillator") return make_oscillator(name, -0.3, -1.0, overrides);
    if (name == "lorenz") return make_lorenz(overrides);
    throw Error(ErrorCode::invalid_argument, "unknown builtin system '" + name + "'");
}

}  // namespace discwave
