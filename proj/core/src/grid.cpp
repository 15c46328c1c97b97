#include "gbulab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gbulab/errors.hpp"

namespace gbulab {

Grid Grid::build(std::span<const Extent> extents, std::span<const std::size_t> points_per_axis) {
    require(!extents.empty() && extents.size() <= 2, "grid: dimension must be 1 or 2");
    require(extents.size() == points_per_axis.size(), "grid: one point count per axis required");

    Grid g;
    g.dim_ = static_cast<int>(extents.size());
    for (std::size_t a = 0; a < extents.size(); ++a) {
        const Extent& e = extents[a];
        const std::size_t n = points_per_axis[a];
        require(std::isfinite(e.lo) && std::isfinite(e.hi) && e.hi > e.lo,
                "grid: degenerate extent on axis " + std::to_string(a));
        require(n >= 3, "grid: at least 3 points per axis are needed for an interior node");
        g.ext_[a] = e;
        g.n_[a] = n;
        g.h_[a] = (e.hi - e.lo) / static_cast<double>(n - 1);
    }
    if (g.dim_ == 1) {
        g.n_[1] = 1;
        g.h_[1] = 0.0;
        g.ext_[1] = Extent{0.0, 0.0};
    }
    return g;
}

Grid Grid::interval(Extent x, std::size_t nx) {
    const std::array<Extent, 1> e{x};
    const std::array<std::size_t, 1> n{nx};
    return build(e, n);
}

Grid Grid::rectangle(Extent x, Extent y, std::size_t nx, std::size_t ny) {
    const std::array<Extent, 2> e{x, y};
    const std::array<std::size_t, 2> n{nx, ny};
    return build(e, n);
}

double Grid::min_spacing() const { return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]); }

double Grid::cell_volume() const { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }

double Grid::coord(int axis, std::size_t k) const {
    const auto a = static_cast<std::size_t>(axis);
    if (k + 1 == n_[a]) return ext_[a].hi;
    return ext_[a].lo + static_cast<double>(k) * h_[a];
}

bool Grid::is_boundary(std::size_t i, std::size_t j) const {
    if (i == 0 || i + 1 == n_[0]) return true;
    if (dim_ == 2 && (j == 0 || j + 1 == n_[1])) return true;
    return false;
}

std::size_t Grid::interior_count() const {
    return dim_ == 1 ? n_[0] - 2 : (n_[0] - 2) * (n_[1] - 2);
}

Field boundary_distance(const Grid& grid) {
    Field d(grid.size(), 0.0);
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            if (grid.is_boundary(i, j)) continue;
            const double xv = grid.x(i);
            double dist = std::min(xv - grid.extent(0).lo, grid.extent(0).hi - xv);
            if (grid.dimension() == 2) {
                const double yv = grid.y(j);
                dist = std::min({dist, yv - grid.extent(1).lo, grid.extent(1).hi - yv});
            }
            d[grid.index(i, j)] = dist;
        }
    }
    return d;
}

} // namespace gbulab

namespace gbulab {

Field trapezoid_weights(const Grid& grid) {
    Field w(grid.size());
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        const double wy = grid.dimension() == 1 ? 1.0 : ((j == 0 || j + 1 == grid.ny()) ? 0.5 : 1.0) * grid.hy();
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const double wx = ((i == 0 || i + 1 == grid.nx()) ? 0.5 : 1.0) * grid.hx();
            w[grid.index(i, j)] = wx * wy;
        }
    }
    return w;
}

double integrate(const Grid& grid, std::span<const double> f) {
    require(f.size() == grid.size(), "integrate: size mismatch");
    const Field w = trapezoid_weights(grid);
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += w[k] * f[k];
    return s;
}

} // namespace gbulab
