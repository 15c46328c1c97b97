#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gbulab/barriers.hpp"
#include "gbulab/errors.hpp"

using namespace gbulab;

TEST(Barriers, PhiDerivativesMatchFiniteDifferences) {
    const double delta = 0.01, beta = 0.25;
    for (double s : {0.0, 1e-3, 0.02, 0.3}) {
        const double h = 1e-6;
        const double fd1 = (phi(s + h, delta, beta) - (s >= h ? phi(s - h, delta, beta) : phi(s, delta, beta))) /
                           (s >= h ? 2.0 * h : h);
        EXPECT_NEAR(phi_prime(s, delta, beta), fd1, 1e-3 * std::abs(fd1) + 1e-6);
        const double fd2 = (phi_prime(s + h, delta, beta) - phi_prime(s, delta, beta)) / h;
        EXPECT_NEAR(phi_second(s, delta, beta), fd2, 2e-3 * std::abs(fd2) + 1e-3);
    }
    EXPECT_EQ(phi(0.0, delta, beta), 0.0);
    EXPECT_NEAR(phi_prime(0.0, delta, beta), std::pow(delta, -beta), 1e-12);
    EXPECT_THROW(phi(-1.0, delta, beta), PreconditionError);
    EXPECT_THROW(phi(0.1, 0.0, beta), PreconditionError);
}

TEST(Barriers, BetaClosedForm) {
    EXPECT_EQ(barrier_beta(3.0, 4.0), 1.0 / 6.0);
    EXPECT_EQ(barrier_beta(4.0, 5.0), 1.0 / 6.0);
    EXPECT_EQ(barrier_beta(3.0, 3.5), 1.0 / 5.0);
}

TEST(Barriers, FoundParametersAreAdmissibleAndCertified) {
    for (auto [p, q] : std::vector<std::pair<double, double>>{{3, 4}, {3, 3.5}, {4, 5}}) {
        for (int N : {1, 2}) {
            BarrierData d;
            d.p = p;
            d.q = q;
            d.N = N;
            d.rho = 0.5;
            const BarrierParams b = find_barrier_params(d);
            EXPECT_TRUE(admissible(b));
            EXPECT_EQ(b.beta, barrier_beta(p, q));
            EXPECT_EQ(b.eta, b.delta);
            EXPECT_LE(b.delta, b.delta_power_bound * (1.0 + 1e-12));
            EXPECT_DOUBLE_EQ(b.K, 2.0 * (N + p - 3.0) / 0.5);
            const std::vector<double> eps{0.0, 1e-3, 1e-1, 1.0};
            const BarrierCertificate c = certify_barrier(d, eps, 2000);
            EXPECT_TRUE(c.certified);
            for (const auto& e : c.entries) {
                EXPECT_GE(e.supersolution.min_residual, 0.0);
                EXPECT_GE(e.comparison.min_residual, 0.0);
            }
            EXPECT_NEAR(c.M2, std::pow(b.delta, -b.beta), 1e-9);
        }
    }
}

TEST(Barriers, LargeDeltaViolatesConstraints) {
    BarrierData d;
    const BarrierParams b = find_barrier_params(d);
    EXPECT_FALSE(admissible(with_delta(b, 2.0 * b.delta_power_bound)));
    const auto checks = barrier_constraints(with_delta(b, 2.0 * b.delta_power_bound));
    bool power_failed = false;
    for (const auto& c : checks)
        if (c.name == "delta_power") power_failed = !c.ok;
    EXPECT_TRUE(power_failed);
}

TEST(Barriers, BoundaryGradientForcesSmallerDelta) {
    BarrierData d;
    const double base = find_barrier_params(d).delta;
    d.grad_g = 1e3;
    const BarrierParams b = find_barrier_params(d);
    EXPECT_LT(b.delta, base);
    EXPECT_GE(phi_prime(b.eta, b.delta, b.beta), 1e3);
}

TEST(Barriers, RejectsHypothesisViolations) {
    BarrierData d;
    d.q = 1.5;
    EXPECT_THROW(find_barrier_params(d), PreconditionError);
    d = BarrierData{};
    d.rho = 0.0;
    EXPECT_THROW(find_barrier_params(d), PreconditionError);
}

TEST(Barriers, ComparisonResidualIncludesTimeTerm) {
    BarrierData d;
    const ResidualReport r = exp_barrier_residual(1.0, 4.0, d, 0.0, 1.0, 101);
    EXPECT_EQ(r.points, 101u);
    EXPECT_GT(r.min_residual, 0.0);
    EXPECT_THROW(exp_barrier_residual(0.0, 4.0, d, 0.0), PreconditionError);
}
