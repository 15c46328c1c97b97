#include "gbulab/operators.hpp"

#include <algorithm>
#include <cmath>

#include "gbulab/errors.hpp"

namespace gbulab {

RegularizedLaw::RegularizedLaw(double p, double q, double eps, double mu)
    : p_(p), q_(q), eps_(eps), mu_(mu), a_(0.5 * (p - 2.0)), s_(0.5 * q), eps_q2_(Power(0.5 * q)(eps)) {}

namespace {

// Derivative along a line of n samples with stride `stride`, spacing h.
inline double line_derivative(std::span<const double> u, std::size_t base, std::size_t k, std::size_t n,
                              std::size_t stride, double h) {
    auto at = [&](std::size_t m) { return u[base + m * stride]; };
    if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (k + 1 == n) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    return (at(k + 1) - at(k - 1)) / (2.0 * h);
}

enum Parts : unsigned { kDiffusion = 1u, kSource = 2u };

// Shared kernel so that the fused and split evaluations agree bitwise.
void apply(const Grid& grid, std::span<const double> u, const RegularizedLaw& law, unsigned parts, Field& out) {
    require(u.size() == grid.size(), "operator: field size does not match grid");
    out.assign(grid.size(), 0.0);
    const bool want_d = (parts & kDiffusion) != 0;
    const bool want_s = (parts & kSource) != 0;

    if (grid.dimension() == 1) {
        const std::size_t n = grid.nx();
        const double h = grid.hx();
        double g_prev = (u[1] - u[0]) / h;
        double f_prev = law.flux(g_prev, g_prev * g_prev);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double g = (u[i + 1] - u[i]) / h;
            const double f = law.flux(g, g * g);
            double v = 0.0;
            if (want_d) v = (f - f_prev) / h;
            if (want_s) {
                const double c = 0.5 * (g_prev + g);
                v += law.source(c * c);
            }
            out[i] = v;
            g_prev = g;
            f_prev = f;
        }
        return;
    }

    const std::size_t nx = grid.nx();
    const std::size_t ny = grid.ny();
    const double hx = grid.hx();
    const double hy = grid.hy();
    auto U = [&](std::size_t i, std::size_t j) { return u[j * nx + i]; };

    // x-faces (i+1/2, j) stored at fx[j*nx + i]; y-faces (i, j+1/2) at fy[j*nx + i].
    Field fx, fy;
    if (want_d) {
        fx.assign(grid.size(), 0.0);
        fy.assign(grid.size(), 0.0);
        for (std::size_t j = 1; j + 1 < ny; ++j) {
            for (std::size_t i = 0; i + 1 < nx; ++i) {
                const double gn = (U(i + 1, j) - U(i, j)) / hx;
                const double gt = ((U(i, j + 1) - U(i, j - 1)) + (U(i + 1, j + 1) - U(i + 1, j - 1))) / (4.0 * hy);
                fx[j * nx + i] = law.flux(gn, gn * gn + gt * gt);
            }
        }
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            for (std::size_t i = 1; i + 1 < nx; ++i) {
                const double gn = (U(i, j + 1) - U(i, j)) / hy;
                const double gt = ((U(i + 1, j) - U(i - 1, j)) + (U(i + 1, j + 1) - U(i - 1, j + 1))) / (4.0 * hx);
                fy[j * nx + i] = law.flux(gn, gn * gn + gt * gt);
            }
        }
    }
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            const std::size_t k = j * nx + i;
            double v = 0.0;
            if (want_d) v = (fx[k] - fx[k - 1]) / hx + (fy[k] - fy[k - nx]) / hy;
            if (want_s) {
                const double gx = (U(i + 1, j) - U(i - 1, j)) / (2.0 * hx);
                const double gy = (U(i, j + 1) - U(i, j - 1)) / (2.0 * hy);
                v += law.source(gx * gx + gy * gy);
            }
            out[k] = v;
        }
    }
}

} // namespace

VectorField gradient(const Grid& grid, std::span<const double> u) {
    require(u.size() == grid.size(), "gradient: field size does not match grid");
    VectorField g;
    g.x.assign(grid.size(), 0.0);
    const std::size_t nx = grid.nx();
    const std::size_t ny = grid.ny();
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) g.x[j * nx + i] = line_derivative(u, j * nx, i, nx, 1, grid.hx());
    if (grid.dimension() == 2) {
        g.y.assign(grid.size(), 0.0);
        for (std::size_t i = 0; i < nx; ++i)
            for (std::size_t j = 0; j < ny; ++j) g.y[j * nx + i] = line_derivative(u, i, j, ny, nx, grid.hy());
    }
    return g;
}

Field gradient_magnitude(const Grid& grid, std::span<const double> u) {
    VectorField g = gradient(grid, u);
    Field m(grid.size());
    if (g.y.empty()) {
        for (std::size_t k = 0; k < m.size(); ++k) m[k] = std::abs(g.x[k]);
    } else {
        for (std::size_t k = 0; k < m.size(); ++k) m[k] = std::hypot(g.x[k], g.y[k]);
    }
    return m;
}

double max_abs(std::span<const double> f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

Field regularized_diffusion(const Grid& grid, std::span<const double> u, double p, double eps) {
    require(p > 2.0, "diffusion: requires p > 2");
    require(eps >= 0.0, "diffusion: requires eps >= 0");
    Field out;
    apply(grid, u, RegularizedLaw(p, p, eps, 0.0), kDiffusion, out);
    return out;
}

Field gradient_source(const Grid& grid, std::span<const double> u, double q, double eps, double mu) {
    require(eps >= 0.0 && mu >= 0.0, "source: requires eps >= 0 and mu >= 0");
    Field out;
    // Only the source law is used; p is irrelevant here.
    apply(grid, u, RegularizedLaw(3.0, q, eps, mu), kSource, out);
    return out;
}

Field source_grad_sq(const Grid& grid, std::span<const double> u) {
    Field out;
    source_grad_sq(grid, u, out);
    return out;
}

void source_grad_sq(const Grid& grid, std::span<const double> u, Field& out) {
    // With q = 2, eps = 0, mu = 1 the source law is the identity on |Du|^2.
    static const RegularizedLaw identity(3.0, 2.0, 0.0, 1.0);
    apply(grid, u, identity, kSource, out);
}

void evaluate_rhs(const Grid& grid, std::span<const double> u, const RegularizedLaw& law, Field& out) {
    apply(grid, u, law, kDiffusion | kSource, out);
}

Field strong_residual(const Grid& grid, std::span<const double> u, const ProblemSpec& spec,
                      std::span<const double> u_t) {
    require(u_t.size() == grid.size(), "strong_residual: u_t does not match the grid");
    Field rhs;
    evaluate_rhs(grid, u, RegularizedLaw(spec.p, spec.q, spec.eps, spec.mu), rhs);
    Field r(grid.size(), 0.0);
    for (std::size_t k = 0; k < r.size(); ++k)
        if (!grid.is_boundary(k)) r[k] = u_t[k] - rhs[k];
    return r;
}

double boundary_flux(const Grid& grid, std::span<const double> u, double p, double eps) {
    const RegularizedLaw law(p, p, eps, 0.0);
    if (grid.dimension() == 1) {
        const std::size_t n = grid.nx();
        const double h = grid.hx();
        const double gl = (u[1] - u[0]) / h;
        const double gr = (u[n - 1] - u[n - 2]) / h;
        return law.flux(gr, gr * gr) - law.flux(gl, gl * gl);
    }
    const std::size_t nx = grid.nx();
    const std::size_t ny = grid.ny();
    const double hx = grid.hx();
    const double hy = grid.hy();
    auto U = [&](std::size_t i, std::size_t j) { return u[j * nx + i]; };
    auto fx = [&](std::size_t i, std::size_t j) {
        const double gn = (U(i + 1, j) - U(i, j)) / hx;
        const double gt = ((U(i, j + 1) - U(i, j - 1)) + (U(i + 1, j + 1) - U(i + 1, j - 1))) / (4.0 * hy);
        return law.flux(gn, gn * gn + gt * gt);
    };
    auto fy = [&](std::size_t i, std::size_t j) {
        const double gn = (U(i, j + 1) - U(i, j)) / hy;
        const double gt = ((U(i + 1, j) - U(i - 1, j)) + (U(i + 1, j + 1) - U(i - 1, j + 1))) / (4.0 * hx);
        return law.flux(gn, gn * gn + gt * gt);
    };
    double total = 0.0;
    for (std::size_t j = 1; j + 1 < ny; ++j) total += hy * (fx(nx - 2, j) - fx(0, j));
    for (std::size_t i = 1; i + 1 < nx; ++i) total += hx * (fy(i, ny - 2) - fy(i, 0));
    return total;
}

} // namespace gbulab
