#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace gbulab {

using Field = std::vector<double>;

/// Closed interval [lo, hi] along one axis.
struct Extent {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
    bool operator==(const Extent&) const = default;
};

/**
 * Uniform node-centered grid on an interval (1D) or a rectangle (2D).
 *
 * Nodes are stored row-major with x varying fastest: node(i, j) = j*nx + i.
 * A 1D grid has ny() == 1. Boundary nodes are exactly the nodes lying on an
 * extent face; everything else is interior. Immutable after construction.
 */
class Grid {
public:
    /// General factory: one extent and one point count per axis (1 or 2 axes).
    static Grid build(std::span<const Extent> extents, std::span<const std::size_t> points_per_axis);

    static Grid interval(Extent x, std::size_t nx);
    static Grid rectangle(Extent x, Extent y, std::size_t nx, std::size_t ny);

    int dimension() const { return dim_; }
    std::size_t nx() const { return n_[0]; }
    std::size_t ny() const { return n_[1]; }
    std::size_t points(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
    std::size_t size() const { return n_[0] * n_[1]; }

    double spacing(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
    double hx() const { return h_[0]; }
    double hy() const { return h_[1]; }
    /// Smallest spacing over the active axes.
    double min_spacing() const;
    /// Volume element used by nodal quadrature (h in 1D, hx*hy in 2D).
    double cell_volume() const;

    const Extent& extent(int axis) const { return ext_[static_cast<std::size_t>(axis)]; }

    std::size_t index(std::size_t i, std::size_t j = 0) const { return j * n_[0] + i; }
    std::size_t ix(std::size_t node) const { return node % n_[0]; }
    std::size_t jy(std::size_t node) const { return node / n_[0]; }

    /// Coordinate of grid line k along an axis; the last line is pinned to hi.
    double coord(int axis, std::size_t k) const;
    double x(std::size_t i) const { return coord(0, i); }
    double y(std::size_t j) const { return dim_ == 2 ? coord(1, j) : 0.0; }
    std::array<double, 2> position(std::size_t node) const { return {x(ix(node)), y(jy(node))}; }

    bool is_boundary(std::size_t i, std::size_t j) const;
    bool is_boundary(std::size_t node) const { return is_boundary(ix(node), jy(node)); }

    std::size_t interior_count() const;

    /// Sample a function f(x, y) at every node (y == 0 in 1D).
    template <typename F>
    Field sample(F&& f) const {
        Field out(size());
        for (std::size_t j = 0; j < n_[1]; ++j)
            for (std::size_t i = 0; i < n_[0]; ++i) out[index(i, j)] = f(x(i), y(j));
        return out;
    }

    bool operator==(const Grid& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && ext_ == o.ext_;
    }

private:
    Grid() = default;

    int dim_ = 1;
    std::array<std::size_t, 2> n_{1, 1};
    std::array<double, 2> h_{0.0, 0.0};
    std::array<Extent, 2> ext_{};
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_shared_grid(Grid g) { return std::make_shared<const Grid>(std::move(g)); }

/// Exact Euclidean distance from each node to the boundary of the box.
Field boundary_distance(const Grid& grid);

} // namespace gbulab

namespace gbulab {

/// Composite trapezoid weights (tensor product in 2D), one per node.
Field trapezoid_weights(const Grid& grid);

/// Trapezoid quadrature of a nodal field over the box.
double integrate(const Grid& grid, std::span<const double> f);

} // namespace gbulab
