#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gbulab/errors.hpp"
#include "gbulab/spectral.hpp"

using namespace gbulab;

TEST(Spectral, OneDimensionalMatchesDiscreteClosedForm) {
    const Grid g = Grid::interval({0.0, 1.0}, 101);
    const EigenData e = principal_eigenpair(g);
    const double h = g.hx();
    EXPECT_NEAR(e.lambda, 2.0 / (h * h) * (1.0 - std::cos(std::numbers::pi * h)), 1e-10);
    EXPECT_LE(e.residual, 1e-10 * e.lambda);
    EXPECT_NEAR(e.phi[50], 1.0, 1e-12);
    EXPECT_EQ(e.phi.front(), 0.0);
    for (std::size_t k = 1; k + 1 < g.size(); ++k) EXPECT_GT(e.phi[k], 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(e.phi[k], std::sin(std::numbers::pi * g.x(k)), 1e-10);
}

TEST(Spectral, TwoDimensionalSeparable) {
    const Grid g = Grid::rectangle({0.0, 1.0}, {0.0, 2.0}, 41, 41);
    const EigenData e = principal_eigenpair(g);
    const double hx = g.hx(), hy = g.hy();
    const double exact = 2.0 / (hx * hx) * (1.0 - std::cos(std::numbers::pi * hx)) +
                         2.0 / (hy * hy) * (1.0 - std::cos(std::numbers::pi * hy / 2.0));
    EXPECT_NEAR(e.lambda, exact, 1e-8 * exact);
    const Field r = negative_laplacian(g, e.phi);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(r[k], e.lambda * e.phi[k], 1e-7 * e.lambda);
}

TEST(Spectral, AlphaWindow) {
    const AlphaWindow w = alpha_window(3.0, 4.0);
    EXPECT_EQ(w.lo, 1.0);
    EXPECT_FALSE(w.lo_included);
    EXPECT_EQ(w.hi, 3.0);
    EXPECT_EQ(w.midpoint(), 2.0);
    EXPECT_FALSE(w.contains(1.0));
    EXPECT_TRUE(w.contains(1.5));
    EXPECT_FALSE(w.contains(3.0));

    const AlphaWindow u = alpha_window(3.0, 5.0);
    EXPECT_EQ(u.lo, 1.0);
    EXPECT_TRUE(u.lo_included);
    EXPECT_TRUE(u.contains(1.0));

    const AlphaWindow v = alpha_window(4.0, 4.5);
    EXPECT_NEAR(v.lo, 2.0, 1e-15);
    EXPECT_FALSE(v.lo_included);
    EXPECT_FALSE(v.contains(2.0));
    EXPECT_TRUE(v.contains(3.0));

    EXPECT_THROW(alpha_window(3.0, 3.0), PreconditionError);
}

TEST(Spectral, BlowupFunctional) {
    const Grid g = Grid::interval({0.0, 1.0}, 201);
    const EigenData e = principal_eigenpair(g);
    const Field one(g.size(), 1.0);
    // integral of sin^2(pi x) = 1/2
    EXPECT_NEAR(blowup_functional(g, one, e.phi, 2.0), 0.5, 1e-4);
    EXPECT_EQ(blowup_weight(e.phi, 2.0).front(), 0.0);
}

TEST(Spectral, OdeFitRecoversExactBlowupInequality) {
    // y' = y^2 with y(0) = 1: y = 1 / (1 - t).
    std::vector<double> t, y;
    for (int i = 0; i <= 400; ++i) {
        t.push_back(0.9 * i / 400.0);
        y.push_back(1.0 / (1.0 - t.back()));
    }
    const BlowupFit f = blowup_ode_fit(t, y, 2.0);
    EXPECT_EQ(f.status, FitStatus::Compliant);
    EXPECT_NEAR(f.C1, 1.0, 0.05);
    EXPECT_LT(f.C2, 0.05);
    EXPECT_GE(f.margin, 0.0);
    EXPECT_EQ(f.samples, 400u);
}

TEST(Spectral, OdeFitDegenerateAndNonCompliant) {
    std::vector<double> t, y, z;
    for (int i = 0; i < 20; ++i) {
        t.push_back(i);
        y.push_back(2.0);
        z.push_back(10.0 - i);
    }
    EXPECT_EQ(blowup_ode_fit(t, y, 3.0).status, FitStatus::Degenerate);
    const BlowupFit f = blowup_ode_fit(t, z, 3.0);
    EXPECT_EQ(f.status, FitStatus::NonCompliant);
    EXPECT_EQ(f.C1, 0.0);
    EXPECT_THROW(blowup_ode_fit(std::vector<double>(5, 0.0), std::vector<double>(5, 0.0), 2.0), PreconditionError);
}

TEST(Spectral, CriterionBracketsThreshold) {
    auto g = make_shared_grid(Grid::interval({0.0, 1.0}, 61));
    const ProblemSpec base = ProblemSpec::make(*g, 3.0, 4.0, 0.0, 1.0, Field(g->size(), 0.0), Field(g->size(), 0.0));
    StepControl ctl;
    ctl.t_end = 0.2;
    ctl.gbu_threshold = 100.0;
    CriterionOptions opt;
    opt.a_lo = 0.2;
    opt.a_hi = 4.0;
    opt.rel_tol = 0.05;
    const CriterionResult r = criterion_experiment(g, base, 2.0, ctl, opt);
    EXPECT_LT(r.a_lo, r.a_hi);
    EXPECT_LE(r.a_hi - r.a_lo, 0.05 * r.a_hi);
    EXPECT_GT(r.y0_threshold, r.y0_lo);
    EXPECT_TRUE(r.t_detect.has_value());
    EXPECT_THROW(criterion_experiment(g, base, 3.5, ctl, opt), PreconditionError);
}
