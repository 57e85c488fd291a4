#pragma once

#include <utility>
#include <vector>

#include "discwave/integrate.hpp"
#include "discwave/symmetry.hpp"
#include "discwave/types.hpp"
#include "discwave/vector_field.hpp"

namespace discwave {

// A periodic orbit with spatio-temporal symmetry, stored over one period
// with dense output. state() wraps times periodically.
class DiscreteWave {
  public:
    DiscreteWave() = default;
    DiscreteWave(VectorField field, SpatioTemporalSymmetry sym, Vec anchor, Trajectory traj,
                 double shooting_residual, OdeOptions ode);

    const VectorField& field() const { return field_; }
    const SpatioTemporalSymmetry& sym() const { return sym_; }
    const Vec& anchor() const { return anchor_; }
    double period() const { return sym_.period; }
    double theta_h() const { return sym_.theta_h; }
    const Trajectory& trajectory() const { return traj_; }
    double shooting_residual() const { return shooting_residual_; }
    const OdeOptions& ode_options() const { return ode_; }

    Vec state(double t) const;    // x*(t), t wrapped into [0, period)
    Vec tangent(double t) const;  // f(x*(t))

    // Closure distances ||phi_{p/k}(x0) - x0|| for k = 2..6 (reported,
    // never a hard failure).
    const std::vector<std::pair<int, double>>& minimality_probe() const { return probe_; }
    void set_minimality_probe(std::vector<std::pair<int, double>> probe) {
        probe_ = std::move(probe);
    }

  private:
    VectorField field_;
    SpatioTemporalSymmetry sym_;
    Vec anchor_;
    Trajectory traj_;
    double shooting_residual_ = 0.0;
    OdeOptions ode_;
    std::vector<std::pair<int, double>> probe_;
};

// Solution of dY/dt = f'(path(t)) Y from Y(t_from) = I to t_to. The path
// is read from the trajectory (no wrapping).
Mat fundamental_solution(const VectorField& f, const Trajectory& path, double t_from, double t_to,
                         const OdeOptions& opts);

// Same along a wave, with periodic wrapping of the path.
Mat fundamental_solution(const DiscreteWave& wave, double t_from, double t_to,
                         const OdeOptions& opts);

struct ShootingOptions {
    double tol = 1e-12;
    int max_iter = 40;
    OdeOptions ode;
};

struct ShootingFailure {
    int iterations = 0;
    double residual = 0.0;
    double condition = 0.0;
};

// Newton iteration on the bordered system
//   h^{-1} phi_T(x0) - x0 = 0,  <f(x_guess), x0 - x_guess> = 0,
// unknowns (x0, T). Returns the wave with period n*T/m.
DiscreteWave find_discrete_wave(const VectorField& f, const GroupElement& h, int n, int m,
                                double theta_guess, const Vec& x_guess,
                                const ShootingOptions& opts);

}  // namespace discwave
