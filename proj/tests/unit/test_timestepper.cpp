#include <gtest/gtest.h>

#include <cmath>

#include "gbulab/errors.hpp"
#include "gbulab/operators.hpp"
#include "gbulab/timestepper.hpp"

using namespace gbulab;

namespace {

ProblemSpec bump(const Grid& g, double p, double q, double amp, double eps = 0.0, double mu = 1.0) {
    return ProblemSpec::make(g, p, q, eps, mu, Field(g.size(), 0.0), sine_bump(g, amp));
}

} // namespace

TEST(Timestepper, StableDtFormula) {
    const Grid g = Grid::interval({0.0, 1.0}, 101);
    ProblemSpec s{3.0, 4.0, 0.01, 1.0, {}, {}};
    StepControl c;
    c.theta = 0.5;
    const double h = 0.01;
    const double W = 2.0;
    const double expect = 0.5 * h * h / (2.0 * 1.0 * 2.0 * std::pow(4.01, 0.5) + h * 4.0 * std::pow(4.01, 1.5));
    EXPECT_NEAR(stable_dt(g, W, s, c), expect, 1e-18);
    s.eps = 0.0;
    EXPECT_TRUE(std::isinf(stable_dt(g, 0.0, s, c)));
}

TEST(Timestepper, ControlValidation) {
    StepControl c;
    c.theta = 1.5;
    EXPECT_THROW(c.validate(), PreconditionError);
    c = StepControl{};
    c.t_end = 0.0;
    EXPECT_THROW(c.validate(), PreconditionError);
    c = StepControl{};
    c.monitor_every = 0;
    EXPECT_THROW(c.validate(), PreconditionError);
}

TEST(Timestepper, StepKeepsBoundaryPinnedAndMatchesEuler) {
    auto g = make_shared_grid(Grid::interval({0.0, 1.0}, 21));
    Field gb(g->size(), 0.0);
    gb.front() = 0.25;
    gb.back() = 0.5;
    Field u0 = sine_bump(*g, 1.0);
    u0.front() = 0.25;
    u0.back() = 0.5;
    const ProblemSpec s = ProblemSpec::make(*g, 3.0, 4.0, 0.0, 1.0, gb, u0);
    const SolutionState st(g, u0, 0.0);
    const double dt = 1e-5;
    const SolutionState next = step(st, s, dt);
    Field rhs;
    evaluate_rhs(*g, u0, RegularizedLaw(3.0, 4.0, 0.0, 1.0), rhs);
    EXPECT_EQ(next.field().front(), 0.25);
    EXPECT_EQ(next.field().back(), 0.5);
    for (std::size_t k = 1; k + 1 < g->size(); ++k) EXPECT_EQ(next.field()[k], u0[k] + dt * rhs[k]);
    EXPECT_DOUBLE_EQ(next.t(), dt);
    EXPECT_THROW(step(st, s, 0.0), PreconditionError);
}

TEST(Timestepper, StationaryDataStaysPut) {
    auto g = make_shared_grid(Grid::interval({0.0, 1.0}, 11));
    const Field c(g->size(), 0.3);
    const ProblemSpec s = ProblemSpec::make(*g, 3.0, 4.0, 0.0, 1.0, c, c);
    StepControl ctl;
    ctl.t_end = 1.0;
    const RunResult r = run(g, s, ctl);
    EXPECT_EQ(r.report.verdict, Verdict::Completed);
    EXPECT_EQ(r.report.steps, 1u);
    EXPECT_EQ(r.trajectory.last().u, c);
    EXPECT_EQ(r.report.final_time, 1.0);
}

TEST(Timestepper, SmallDataDecaysAndCompletes) {
    auto g = make_shared_grid(Grid::interval({0.0, 1.0}, 41));
    StepControl ctl;
    ctl.t_end = 0.05;
    ctl.snapshot_every = 50;
    const RunResult r = run(g, bump(*g, 3.0, 4.0, 0.2), ctl);
    EXPECT_EQ(r.report.verdict, Verdict::Completed);
    EXPECT_EQ(r.report.final_time, 0.05);
    EXPECT_GT(r.trajectory.frames.size(), 2u);
    EXPECT_LT(r.trajectory.monitors.back().max_u, 0.2);
    EXPECT_GE(r.trajectory.monitors.back().min_u, 0.0);
    EXPECT_LE(r.report.smallest_dt, r.report.largest_dt);
}

TEST(Timestepper, LargeDataDetectsGradientBlowUp) {
    auto g = make_shared_grid(Grid::interval({0.0, 1.0}, 81));
    StepControl ctl;
    ctl.t_end = 1.0;
    ctl.gbu_threshold = 60.0;
    RunOptions opt;
    opt.threshold_ladder = {15.0, 30.0};
    const RunResult r = run(g, bump(*g, 3.0, 4.0, 3.0), ctl, opt);
    ASSERT_EQ(r.report.verdict, Verdict::GBUDetected);
    ASSERT_TRUE(r.report.t_detect.has_value());
    ASSERT_EQ(r.report.crossings.size(), 2u);
    EXPECT_LE(r.report.crossings[0].t, r.report.crossings[1].t);
    EXPECT_LE(r.report.crossings[1].t, *r.report.t_detect);
    EXPECT_GE(r.trajectory.monitors.back().grad_inf, 60.0);
    EXPECT_LE(r.trajectory.monitors.back().max_u, 3.0 + 1e-12);
}

TEST(Timestepper, OutputTimesAreHitExactly) {
    auto g = make_shared_grid(Grid::interval({0.0, 1.0}, 31));
    StepControl ctl;
    ctl.t_end = 0.01;
    RunOptions opt;
    opt.output_times = {0.001, 0.0035, 0.007};
    const RunResult r = run(g, bump(*g, 3.0, 2.5, 0.5), ctl, opt);
    for (double t : opt.output_times) {
        bool found = false;
        for (const Frame& f : r.trajectory.frames) found = found || f.t == t;
        EXPECT_TRUE(found) << t;
    }
}

TEST(Timestepper, StepBudgetStalls) {
    auto g = make_shared_grid(Grid::interval({0.0, 1.0}, 31));
    StepControl ctl;
    ctl.max_steps = 10;
    const RunResult r = run(g, bump(*g, 3.0, 2.5, 0.5), ctl);
    EXPECT_EQ(r.report.verdict, Verdict::StalledStep);
    EXPECT_EQ(r.report.steps, 10u);
}

TEST(Timestepper, RestartContinuesBitwise) {
    auto g = make_shared_grid(Grid::interval({0.0, 1.0}, 31));
    const ProblemSpec s = bump(*g, 3.0, 2.5, 0.5);
    StepControl ctl;
    ctl.t_end = 0.004;
    const RunResult full = run(g, s, ctl);
    StepControl first = ctl;
    first.max_steps = full.report.steps / 2;
    const RunResult half = run(g, s, first);
    const RunResult rest = run_from(SolutionState(g, half.trajectory.last().u, half.report.final_time), s, ctl);
    EXPECT_EQ(rest.trajectory.last().u, full.trajectory.last().u);
    EXPECT_EQ(rest.report.final_time, full.report.final_time);
}

TEST(Timestepper, LockstepSharesTimeLevels) {
    auto g = make_shared_grid(Grid::interval({0.0, 1.0}, 41));
    const ProblemSpec a = bump(*g, 3.0, 2.5, 0.5);
    const ProblemSpec b = bump(*g, 3.0, 2.5, 1.0);
    StepControl ctl;
    ctl.t_end = 0.01;
    ctl.snapshot_every = 7;
    std::size_t calls = 0;
    const PairResult pr = run_lockstep(g, a, b, ctl, [&](double, const Field&, const Field&) { ++calls; });
    ASSERT_EQ(pr.first.trajectory.frames.size(), pr.second.trajectory.frames.size());
    for (std::size_t k = 0; k < pr.first.trajectory.frames.size(); ++k)
        EXPECT_EQ(pr.first.trajectory.frames[k].t, pr.second.trajectory.frames[k].t);
    EXPECT_EQ(calls, pr.first.report.steps + 1);
    EXPECT_EQ(pr.first.report.final_time, 0.01);
}

TEST(Timestepper, EnergyAccumulatorsMonotone) {
    auto g = make_shared_grid(Grid::interval({0.0, 1.0}, 41));
    StepControl ctl;
    ctl.t_end = 0.01;
    const RunResult r = run(g, bump(*g, 3.0, 2.5, 0.5), ctl);
    for (std::size_t k = 1; k < r.trajectory.monitors.size(); ++k) {
        EXPECT_GE(r.trajectory.monitors[k].ut_l2_acc, r.trajectory.monitors[k - 1].ut_l2_acc);
        EXPECT_GE(r.trajectory.monitors[k].source_acc, r.trajectory.monitors[k - 1].source_acc);
    }
}
