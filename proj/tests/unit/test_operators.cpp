#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gbulab/errors.hpp"
#include "gbulab/operators.hpp"

using namespace gbulab;

namespace {

double max_interior_error(const Grid& g, const Field& approx, const Field& exact, double min_abs_x = 0.0) {
    double e = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k) || std::abs(g.position(k)[0]) < min_abs_x) continue;
        e = std::max(e, std::abs(approx[k] - exact[k]));
    }
    return e;
}

} // namespace

TEST(Operators, GradientExactOnQuadraticsIncludingBoundary) {
    const Grid g = Grid::rectangle({-1.0, 1.0}, {0.0, 1.0}, 21, 11);
    const Field u = g.sample([](double x, double y) { return x * x + 3.0 * x * y - y * y; });
    const VectorField d = gradient(g, u);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto [x, y] = g.position(k);
        EXPECT_NEAR(d.x[k], 2.0 * x + 3.0 * y, 1e-12);
        EXPECT_NEAR(d.y[k], 3.0 * x - 2.0 * y, 1e-12);
    }
}

TEST(Operators, SourceExactOnQuadratics) {
    const Grid g = Grid::interval({0.0, 1.0}, 33);
    const Field u = g.sample([](double x, double) { return x * x; });
    const Field s = gradient_source(g, u, 4.0, 0.0, 2.0);
    const Field exact = g.sample([](double x, double) { return 2.0 * std::pow(2.0 * x, 4.0); });
    EXPECT_LT(max_interior_error(g, s, exact), 1e-12);
    EXPECT_EQ(s.front(), 0.0);
    EXPECT_EQ(s.back(), 0.0);

    const Grid r = Grid::rectangle({-1.0, 1.0}, {-1.0, 1.0}, 17, 17);
    const Field v = r.sample([](double x, double y) { return x * x + y * y; });
    const Field s2 = gradient_source(r, v, 3.0, 0.5, 1.0);
    const Field e2 = r.sample([](double x, double y) {
        return std::pow(4.0 * (x * x + y * y) + 0.5, 1.5) - std::pow(0.5, 1.5);
    });
    EXPECT_LT(max_interior_error(r, s2, e2), 1e-12);
}

TEST(Operators, DiffusionExactForCubicFluxOnQuadratic) {
    // p = 3: div(|u'| u') of x^2 is 8|x|, reproduced exactly away from x = 0.
    const Grid g = Grid::interval({0.0, 1.0}, 65);
    const Field u = g.sample([](double x, double) { return x * x; });
    const Field d = regularized_diffusion(g, u, 3.0, 0.0);
    const Field exact = g.sample([](double x, double) { return 8.0 * x; });
    EXPECT_LT(max_interior_error(g, d, exact), 1e-10);
}

TEST(Operators, DiffusionSecondOrderOnQuadratic) {
    const double p = 3.5;
    const double eps = 0.1;
    auto exact = [&](double x) {
        // d/dx[(4x^2+eps)^{(p-2)/2} 2x]
        const double s = 4.0 * x * x + eps;
        return 2.0 * std::pow(s, 0.5 * (p - 2.0)) + 8.0 * x * x * (p - 2.0) * std::pow(s, 0.5 * (p - 4.0));
    };
    std::vector<double> err;
    for (std::size_t n : {33u, 65u, 129u}) {
        const Grid g = Grid::interval({0.0, 1.0}, n);
        const Field d = regularized_diffusion(g, g.sample([](double x, double) { return x * x; }), p, eps);
        err.push_back(max_interior_error(g, d, g.sample([&](double x, double) { return exact(x); })));
    }
    EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.3);
    EXPECT_NEAR(std::log2(err[1] / err[2]), 2.0, 0.3);
}

TEST(Operators, DiffusionConservative) {
    for (const Grid& g : {Grid::interval({0.0, 1.0}, 41), Grid::rectangle({0.0, 1.0}, {0.0, 2.0}, 21, 31)}) {
        const Field u = g.sample([](double x, double y) { return std::sin(3.0 * x) * std::cos(y) + x * y * y; });
        const Field d = regularized_diffusion(g, u, 3.5, 0.01);
        double sum = 0.0;
        for (double v : d) sum += v;
        EXPECT_NEAR(sum * g.cell_volume(), boundary_flux(g, u, 3.5, 0.01), 1e-11);
    }
}

TEST(Operators, FusedEqualsSumBitwise) {
    const Grid g = Grid::rectangle({0.0, 1.0}, {0.0, 1.0}, 19, 23);
    const Field u = g.sample([](double x, double y) { return std::exp(x) * std::sin(2.0 * y); });
    Field fused;
    evaluate_rhs(g, u, RegularizedLaw(3.0, 4.0, 0.01, 0.7), fused);
    const Field d = regularized_diffusion(g, u, 3.0, 0.01);
    const Field s = gradient_source(g, u, 4.0, 0.01, 0.7);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(fused[k], d[k] + s[k]);
}

TEST(Operators, ConstantsAreStationary) {
    const Grid g = Grid::rectangle({0.0, 1.0}, {0.0, 1.0}, 9, 9);
    const Field u(g.size(), 0.7);
    Field rhs;
    evaluate_rhs(g, u, RegularizedLaw(3.0, 4.0, 0.0, 1.0), rhs);
    for (double v : rhs) EXPECT_EQ(v, 0.0);
    const Field r = strong_residual(g, u, ProblemSpec{3.0, 4.0, 0.0, 1.0, u, u}, Field(g.size(), 0.0));
    for (double v : r) EXPECT_EQ(v, 0.0);
}

TEST(Operators, LawSourceVanishesAtZeroGradient) {
    const RegularizedLaw law(3.0, 4.0, 0.3, 2.0);
    EXPECT_EQ(law.source(0.0), 0.0);
    EXPECT_NEAR(law.source(1.0), 2.0 * (1.3 * 1.3 - 0.09), 1e-14);
    EXPECT_NEAR(law.diffusivity(0.0), std::sqrt(0.3), 1e-15);
}

TEST(Operators, RejectsBadArguments) {
    const Grid g = Grid::interval({0.0, 1.0}, 9);
    EXPECT_THROW(regularized_diffusion(g, Field(9, 0.0), 2.0, 0.0), PreconditionError);
    EXPECT_THROW(regularized_diffusion(g, Field(8, 0.0), 3.0, 0.0), PreconditionError);
    EXPECT_THROW(gradient_source(g, Field(9, 0.0), 4.0, -1.0, 1.0), PreconditionError);
}
