#pragma once

#include <optional>
#include <span>

#include "gbulab/grid.hpp"

namespace gbulab {

/**
 * Parameters and data of the regularized problem
 *
 *   u_t - div((|Du|^2 + eps)^{(p-2)/2} Du) = mu * [(|Du|^2 + eps)^{q/2} - eps^{q/2}]
 *
 * with u = g on the boundary and u(0) = u0. eps = 0 is the degenerate equation.
 * g is a field sampled on every node; only its boundary values are imposed.
 */
struct ProblemSpec {
    double p = 3.0;
    double q = 4.0;
    double eps = 0.0;
    double mu = 1.0;
    Field g;
    Field u0;

    /// Throws PreconditionError naming the violated hypothesis.
    void validate(const Grid& grid) const;

    static ProblemSpec make(const Grid& grid, double p, double q, double eps, double mu, Field g, Field u0);
};

/// Checks p > 2 and q > p - 1 (the well-posedness hypothesis).
void validate_exponents(double p, double q);

/// amplitude * prod_k sin(pi (x_k - lo_k) / L_k) at interior nodes, 0 on the
/// boundary: the positive sine bump (add g for nonzero boundary data).
Field sine_bump(const Grid& grid, double amplitude);

/**
 * Grid field u at time t with a lazily computed |Du| cache.
 * Any mutation through mutable_u() or set() invalidates the cache.
 */
class SolutionState {
public:
    SolutionState(GridPtr grid, Field u, double t = 0.0);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::span<const double> u() const { return u_; }
    const Field& field() const { return u_; }
    double t() const { return t_; }

    Field& mutable_u() {
        cache_.reset();
        return u_;
    }
    void set(Field u, double t);
    void set_time(double t) { t_ = t; }

    /// Central/one-sided gradient magnitude, recomputed on demand.
    const Field& grad_magnitude() const;
    double grad_inf() const;

private:
    GridPtr grid_;
    Field u_;
    double t_ = 0.0;
    mutable std::optional<Field> cache_;
};

/// Max over boundary nodes of |u - g|.
double boundary_mismatch(const Grid& grid, std::span<const double> u, std::span<const double> g);

} // namespace gbulab
