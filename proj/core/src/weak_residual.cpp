#include "gbulab/weak_residual.hpp"

#include <cmath>

#include "gbulab/errors.hpp"
#include "gbulab/operators.hpp"

namespace gbulab {

WeakResidual weak_residual(const Trajectory& traj, const TestFunction& psi) {
    require(traj.grid != nullptr, "weak_residual: empty trajectory");
    require(traj.frames.size() >= 2, "weak_residual: needs at least two time levels");
    const Grid& grid = *traj.grid;
    const ProblemSpec& spec = traj.spec;
    const RegularizedLaw law(spec.p, spec.q, spec.eps, spec.mu);
    const Field w = trapezoid_weights(grid);
    const auto& fr = traj.frames;
    const std::size_t m = fr.size();

    std::vector<double> value(m), scale(m);
    for (std::size_t n = 0; n < m; ++n) {
        const double t = fr[n].t;
        const Field ps = grid.sample([&](double x, double y) { return psi(x, y, t); });
        for (std::size_t k = 0; k < ps.size(); ++k) {
            require(ps[k] >= 0.0, "weak_residual: test function must be nonnegative");
            if (grid.is_boundary(k)) require(ps[k] == 0.0, "weak_residual: test function must vanish on the boundary");
        }
        const std::size_t a = n == 0 ? 0 : n - 1;
        const std::size_t b = n + 1 == m ? n : n + 1;
        const double span = fr[b].t - fr[a].t;
        require(span > 0.0, "weak_residual: frame times must increase");

        const VectorField du = gradient(grid, fr[n].u);
        const VectorField dp = gradient(grid, ps);
        double v = 0.0, s = 0.0;
        for (std::size_t k = 0; k < ps.size(); ++k) {
            const double ut = (fr[b].u[k] - fr[a].u[k]) / span;
            double gsq = du.x[k] * du.x[k];
            double dot = du.x[k] * dp.x[k];
            if (!du.y.empty()) {
                gsq += du.y[k] * du.y[k];
                dot += du.y[k] * dp.y[k];
            }
            const double t1 = ut * ps[k];
            const double t2 = law.diffusivity(gsq) * dot;
            const double t3 = law.source(gsq) * ps[k];
            v += w[k] * (t1 + t2 - t3);
            s += w[k] * (std::abs(t1) + std::abs(t2) + std::abs(t3));
        }
        value[n] = v;
        scale[n] = s;
    }
    WeakResidual r;
    for (std::size_t n = 0; n + 1 < m; ++n) {
        const double dt = fr[n + 1].t - fr[n].t;
        r.value += 0.5 * dt * (value[n] + value[n + 1]);
        r.scale += 0.5 * dt * (scale[n] + scale[n + 1]);
    }
    return r;
}

} // namespace gbulab
