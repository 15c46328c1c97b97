#pragma once

#include <span>

#include "gbulab/grid.hpp"
#include "gbulab/power.hpp"
#include "gbulab/problem.hpp"

namespace gbulab {

/// Gradient components; y is empty for 1D grids.
struct VectorField {
    Field x;
    Field y;
};

/// Pointwise flux and source laws of the regularized equation.
class RegularizedLaw {
public:
    RegularizedLaw(double p, double q, double eps, double mu);

    /// (s + eps)^{(p-2)/2} for s = |Du|^2.
    double diffusivity(double grad_sq) const { return a_(grad_sq + eps_); }
    /// Flux component along a face normal: a(|Du|^2) * normal derivative.
    double flux(double normal_derivative, double grad_sq) const { return diffusivity(grad_sq) * normal_derivative; }
    /// mu * [(s + eps)^{q/2} - eps^{q/2}], clamped at 0.
    double source(double grad_sq) const {
        const double v = mu_ * (s_(grad_sq + eps_) - eps_q2_);
        return v > 0.0 ? v : 0.0;
    }

    double p() const { return p_; }
    double q() const { return q_; }
    double eps() const { return eps_; }
    double mu() const { return mu_; }

private:
    double p_, q_, eps_, mu_;
    Power a_;
    Power s_;
    double eps_q2_;
};

/// Central differences at interior nodes, second-order one-sided at boundary nodes.
VectorField gradient(const Grid& grid, std::span<const double> u);
Field gradient_magnitude(const Grid& grid, std::span<const double> u);
double max_abs(std::span<const double> f);

/**
 * Conservative flux-form div((|Du|^2 + eps)^{(p-2)/2} Du) at interior nodes
 * (boundary entries are 0). Face normal derivatives use the two-point
 * difference; in 2D the tangential derivative on a face averages the two
 * adjacent central differences.
 */
Field regularized_diffusion(const Grid& grid, std::span<const double> u, double p, double eps);

/**
 * mu * [(|Du|^2 + eps)^{q/2} - eps^{q/2}] at interior nodes (boundary entries 0).
 * The nodal |Du|^2 is built from central differences along each axis, the same
 * gradient as gradient(); it is exact on quadratics.
 */
Field gradient_source(const Grid& grid, std::span<const double> u, double q, double eps, double mu);

/// Nodal |Du|^2 used by gradient_source.
Field source_grad_sq(const Grid& grid, std::span<const double> u);
void source_grad_sq(const Grid& grid, std::span<const double> u, Field& out);

/// diffusion + source written into out (resized to grid.size()); the fused
/// evaluation is bitwise identical to the sum of the two operators.
void evaluate_rhs(const Grid& grid, std::span<const double> u, const RegularizedLaw& law, Field& out);

/// u_t - diffusion - source at interior nodes; 0 on the boundary.
Field strong_residual(const Grid& grid, std::span<const double> u, const ProblemSpec& spec,
                      std::span<const double> u_t);

/// Net outward flux through the box faces, matching sum(diffusion) * cell volume.
double boundary_flux(const Grid& grid, std::span<const double> u, double p, double eps);

} // namespace gbulab
