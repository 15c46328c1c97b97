#pragma once

#include <functional>

#include "gbulab/trajectory.hpp"

namespace gbulab {

/// Test function psi(x, y, t) (y == 0 in 1D).
using TestFunction = std::function<double(double, double, double)>;

struct WeakResidual {
    double value = 0.0; ///< integral of u_t psi + a(|Du|^2) Du . Dpsi - S(|Du|^2) psi over the recorded span
    double scale = 0.0; ///< same integral of the absolute values of the three terms
    double relative() const { return scale > 0.0 ? value / scale : 0.0; }
};

/// Quadrature of the weak form over the recorded frames: trapezoid in space and time,
/// u_t from differences between frames (central inside, one-sided at the ends), and the
/// regularized flux and source of the trajectory's spec. Throws PreconditionError when
/// fewer than two frames are recorded, psi < 0 somewhere, or psi != 0 on the boundary.
WeakResidual weak_residual(const Trajectory& traj, const TestFunction& psi);

} // namespace gbulab
