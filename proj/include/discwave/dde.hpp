#pragma once

#include <functional>
#include <vector>

#include "discwave/flow.hpp"
#include "discwave/types.hpp"

namespace discwave {

// A function [-theta, 0] -> R^N sampled on M+1 uniform nodes, evaluated
// between nodes by C^1 cubic interpolation with 4th-order finite-difference
// slopes. Requires M >= 4.
class HistorySegment {
  public:
    HistorySegment() = default;
    HistorySegment(double theta, std::vector<Vec> nodes);

    static HistorySegment sample(const std::function<Vec(double)>& fn, double theta, int m);

    double theta() const { return theta_; }
    int m() const { return static_cast<int>(nodes_.size()) - 1; }
    int dim() const { return nodes_.empty() ? 0 : static_cast<int>(nodes_.front().size()); }
    const std::vector<Vec>& nodes() const { return nodes_; }
    double node_time(int k) const { return -theta_ + k * (theta_ / m()); }

    Vec eval(double t) const;  // t in [-theta, 0]

  private:
    double theta_ = 0.0;
    std::vector<Vec> nodes_;
    std::vector<Vec> slopes_;
};

struct SimSample {
    double t = 0.0;
    Vec x;
    double control_norm = 0.0;
};

struct ControlledRun {
    std::vector<Trajectory> segments;  // one per delay interval
    std::vector<SimSample> samples;    // uniform log over [0, t_end]
    double t_end = 0.0;

    Vec state(double t) const;  // t in [0, t_end]
};

// Method of steps for x' = f(x) + b (x(t) - h x(t - theta)), delayed term
// read from the stored dense history.
ControlledRun simulate_controlled(const VectorField& f, const GroupElement& h, double theta,
                                  double b, const HistorySegment& initial, double t_end,
                                  const OdeOptions& opts, int samples_per_delay = 64);

// Method of steps for the linearization along the wave,
// y' = [f'(x*(t)) + b I] y - b h y(t - theta), started at t_start (the
// coefficients are read at absolute time).
ControlledRun simulate_linearized(const DiscreteWave& wave, double b, double t_start,
                                  const HistorySegment& initial, double duration,
                                  const OdeOptions& opts);

struct DiscretizedOperator {
    int m = 0;
    int dim = 0;
    Mat matrix;  // (m+1)*dim square
    double assembly_tol = 0.0;
};

// Columns are the images of the nodal basis histories under one controlled
// twisted step: integrate y' = [f'(x*(t)) + b I] y - b h phi(t - theta)
// over [0, theta] node-to-node (integration never steps across a history
// knot) and sample h^{-1} y on the grid.
DiscretizedOperator linearized_step_operator(const DiscreteWave& wave, double b, int m,
                                             const OdeOptions& opts);

// Top-k eigenvalues of the assembled matrix by modulus.
CVec oracle_spectrum(const DiscretizedOperator& op, int k);

// Min over the orbit phase of ||x - x*(t)||, coarse grid plus one parabolic
// refinement.
double distance_to_orbit(const Vec& x, const DiscreteWave& wave);

}  // namespace discwave
