#pragma once

#include <vector>

#include "gbulab/grid.hpp"
#include "gbulab/problem.hpp"

namespace gbulab {

/// One recorded time level. ut is the backward difference (u^n - u^{n-1}) / dt
/// of the step that produced this level (zero for the initial frame).
struct Frame {
    double t = 0.0;
    double dt = 0.0;
    std::size_t step = 0;
    Field u;
    Field ut;
};

/// Per-step monitor values.
struct MonitorSample {
    double t = 0.0;
    double max_u = 0.0;
    double min_u = 0.0;
    double grad_inf = 0.0;
    double y = 0.0;          ///< weighted mass, 0 when not requested
    double ut_l2_acc = 0.0;  ///< running quadrature of the integral of u_t^2 over Omega x (0, t)
    double source_acc = 0.0; ///< running quadrature of (|Du|^2 + eps)^q over Omega x (0, t)
};

/// Recorded history of a run: strided frames plus per-step monitors.
struct Trajectory {
    GridPtr grid;
    ProblemSpec spec;
    std::vector<Frame> frames;
    std::vector<MonitorSample> monitors;

    const Frame& initial() const { return frames.front(); }
    const Frame& last() const { return frames.back(); }
};

} // namespace gbulab
