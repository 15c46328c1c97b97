#include "gbulab/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gbulab/errors.hpp"
#include "gbulab/operators.hpp"

namespace gbulab {

void validate_exponents(double p, double q) {
    if (!(p > 2.0)) {
        std::ostringstream os;
        os << "requires p > 2 (degenerate diffusion exponent), got p = " << p;
        throw PreconditionError(os.str());
    }
    if (!(q > p - 1.0)) {
        std::ostringstream os;
        os << "requires q > p-1 (well-posedness hypothesis q > p-1 > 1), got p = " << p << ", q = " << q;
        throw PreconditionError(os.str());
    }
}

void ProblemSpec::validate(const Grid& grid) const {
    validate_exponents(p, q);
    require(eps >= 0.0 && std::isfinite(eps), "requires eps >= 0");
    require(mu >= 0.0 && std::isfinite(mu), "requires mu >= 0");
    require(g.size() == grid.size(), "boundary data g does not match the grid");
    require(u0.size() == grid.size(), "initial data u0 does not match the grid");
    for (std::size_t n = 0; n < grid.size(); ++n) {
        require(std::isfinite(u0[n]) && std::isfinite(g[n]), "data must be finite");
        require(u0[n] >= 0.0, "requires u0 >= 0");
        if (grid.is_boundary(n)) require(g[n] >= 0.0, "requires g >= 0 on the boundary");
    }
    require(boundary_mismatch(grid, u0, g) == 0.0, "compatibility: u0 must equal g on boundary nodes");
}

ProblemSpec ProblemSpec::make(const Grid& grid, double p, double q, double eps, double mu, Field g, Field u0) {
    ProblemSpec s{p, q, eps, mu, std::move(g), std::move(u0)};
    s.validate(grid);
    return s;
}

Field sine_bump(const Grid& grid, double amplitude) {
    const double pi = std::numbers::pi;
    Field out(grid.size(), 0.0);
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            if (grid.is_boundary(i, j)) continue;
            double v = amplitude * std::sin(pi * (grid.x(i) - grid.extent(0).lo) / grid.extent(0).length());
            if (grid.dimension() == 2)
                v *= std::sin(pi * (grid.y(j) - grid.extent(1).lo) / grid.extent(1).length());
            out[grid.index(i, j)] = v;
        }
    }
    return out;
}

double boundary_mismatch(const Grid& grid, std::span<const double> u, std::span<const double> g) {
    double worst = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n)
        if (grid.is_boundary(n)) worst = std::max(worst, std::abs(u[n] - g[n]));
    return worst;
}

SolutionState::SolutionState(GridPtr grid, Field u, double t) : grid_(std::move(grid)), u_(std::move(u)), t_(t) {
    require(grid_ != nullptr, "state: null grid");
    require(u_.size() == grid_->size(), "state: field size does not match grid");
}

void SolutionState::set(Field u, double t) {
    require(u.size() == grid_->size(), "state: field size does not match grid");
    u_ = std::move(u);
    t_ = t;
    cache_.reset();
}

const Field& SolutionState::grad_magnitude() const {
    if (!cache_) cache_ = gradient_magnitude(*grid_, u_);
    return *cache_;
}

double SolutionState::grad_inf() const { return max_abs(grad_magnitude()); }

} // namespace gbulab
