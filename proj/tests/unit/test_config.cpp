#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "config.hpp"
#include "dispatch.hpp"
#include "gbulab/errors.hpp"
#include "gbulab/field_io.hpp"

using namespace gbulab;
using namespace gbulab::cli;

namespace {

const std::string kMinimal = R"(# smallest simulate run
[experiment]
kind = simulate

[grid]
nx = 21

[problem]
p = 3
q = 2.5

[control]
t_end = 0.01
)";

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string with_kind(const std::string& kind, double p, double q, const std::string& extra = "") {
    return "[experiment]\nkind = " + kind + "\n[grid]\nnx = 21\n[problem]\np = " + std::to_string(p) +
           "\nq = " + std::to_string(q) + "\n[control]\nt_end = 0.01\n" + extra;
}

} // namespace

TEST(Config, MinimalSimulateRoundTrips) {
    const RunConfig c = parse_config(kMinimal);
    EXPECT_EQ(c.kind, ExperimentKind::Simulate);
    EXPECT_EQ(c.grid.nx, 21u);
    EXPECT_DOUBLE_EQ(c.problem.q, 2.5);
    const std::string text = canonical_text(c);
    EXPECT_EQ(canonical_text(parse_config(text)), text);
}

TEST(Config, FullConfigRoundTrips) {
    const std::string full = R"([experiment]
kind = gbu_detect
output = "runs/with space"
seed = 18446744073709551615
alpha = 2
[grid]
dimension = 2
nx = 11
ny = 21
x_lo = -1
x_hi = 1
y_lo = 0
y_hi = 0.3
[problem]
p = 3
q = 4
eps = 1e-3
mu = 0.7071067811865476
amplitude = 1.44375
boundary_value = 0.1
[control]
t_end = 0.3
theta = 0.45
dt_min = 1e-13
gbu_threshold = 500
snapshot_every = 10
monitor_every = 2
max_steps = 1000
[analysis]
thresholds = 100, 200, 400
resolutions = 11, 21
)";
    const RunConfig c = parse_config(full);
    EXPECT_EQ(c.seed, 18446744073709551615ull);
    EXPECT_EQ(c.output, "runs/with space");
    ASSERT_EQ(c.analysis.thresholds.size(), 3u);
    EXPECT_EQ(c.analysis.resolutions.back(), 21u);
    EXPECT_DOUBLE_EQ(c.problem.mu, 0.7071067811865476);
    const std::string text = canonical_text(c);
    const RunConfig again = parse_config(text);
    EXPECT_EQ(canonical_text(again), text);
    EXPECT_EQ(again.problem.mu, c.problem.mu);
    EXPECT_EQ(again.control.theta, c.control.theta);
}

TEST(Config, InlineComments) {
    const RunConfig c = parse_config("[experiment]\nkind = simulate   # trailing\noutput = \"a #b\"\n[grid]\nnx = 21 ; "
                                     "points\n[problem]\np = 3\nq = 2.5\n[control]\nt_end = 0.1\n");
    EXPECT_EQ(c.grid.nx, 21u);
    EXPECT_EQ(c.output, "a #b");
}

TEST(Config, RejectsWellPosednessViolation) {
    const std::string msg = config_error(with_kind("simulate", 3, 2));
    EXPECT_NE(msg.find("requires q > p-1"), std::string::npos) << msg;
}

TEST(Config, CriterionBisectNeedsQAboveP) {
    const std::string msg = config_error(with_kind("criterion_bisect", 3, 3));
    EXPECT_NE(msg.find("q > p > 2"), std::string::npos) << msg;
    EXPECT_EQ(config_error(with_kind("criterion_bisect", 3, 4)), "");
}

TEST(Config, FailsClosed) {
    EXPECT_NE(config_error(kMinimal + "typo_key = 1\n").find("unknown key"), std::string::npos);
    EXPECT_NE(config_error(kMinimal + "[extra]\nx = 1\n").find("unknown key"), std::string::npos);
    EXPECT_NE(config_error(kMinimal + "t_end = 2\n").find("single value"), std::string::npos);
    EXPECT_NE(config_error("[experiment]\nkind = simulate\n[grid]\nnx = 5\n[problem]\np = 3\n[control]\nt_end = 1\n")
                  .find("missing required key [problem] q"),
              std::string::npos);
    EXPECT_NE(config_error(with_kind("nonsense", 3, 4)).find("unknown kind"), std::string::npos);
    // Keys of another kind are not silently ignored.
    EXPECT_NE(config_error(kMinimal + "[analysis]\nthresholds = 1, 2\n").find("not used by kind"), std::string::npos);
}

TEST(Config, RejectsBadValues) {
    EXPECT_NE(config_error(with_kind("simulate", 3, 2.5) + "[analysis]\nc = abc\n").find("finite number"),
              std::string::npos);
    EXPECT_NE(config_error(with_kind("epsilon_continuation", 3, 2.5, "[analysis]\neps_list = 1e-2, 1e-2, 1e-4\n"))
                  .find("strictly decreasing"),
              std::string::npos);
    EXPECT_NE(config_error(with_kind("criterion_bisect", 3, 4, "[analysis]\na_lo = 2\na_hi = 1\n")).find("a_lo < a_hi"),
              std::string::npos);
    const std::string alpha = "[experiment]\nkind = criterion_bisect\nalpha = 5\n[grid]\nnx = 21\n[problem]\np = 3\nq = "
                              "4\n[control]\nt_end = 0.1\n";
    EXPECT_NE(config_error(alpha).find("admissible window"), std::string::npos);
    EXPECT_NE(config_error(with_kind("gbu_detect", 3, 4)).find("thresholds is required"), std::string::npos);
    EXPECT_EQ(config_error(with_kind("compliance_suite", 3, 2.5)), "");
    const std::string traj = "[experiment]\nkind = compliance_suite\ntrajectory = t.bin\nchecks = energy\n[grid]\nnx = "
                             "21\n[problem]\np = 3\nq = 2.5\n[control]\nt_end = 0.1\n";
    EXPECT_NE(config_error(traj).find("cannot run on a trajectory"), std::string::npos);
}

TEST(Config, VerbsMapToKinds) {
    for (const char* v : {"simulate", "continue-eps", "detect-gbu", "certify-barrier", "bisect-criterion", "check", "eig"}) {
        auto k = kind_from_verb(v);
        ASSERT_TRUE(k) << v;
        EXPECT_EQ(verb_of(*k), v);
        EXPECT_EQ(kind_from_string(to_string(*k)), k);
    }
    EXPECT_FALSE(kind_from_verb("simulate-all"));
}

TEST(Config, OutputPrecedence) {
    EXPECT_EQ(resolve_output(std::string("a"), "b", "c"), std::filesystem::path("a"));
    EXPECT_EQ(resolve_output(std::nullopt, "b", "c"), std::filesystem::path("b"));
    EXPECT_EQ(resolve_output(std::nullopt, "", "c"), std::filesystem::path("c"));
    EXPECT_EQ(resolve_output(std::nullopt, "", nullptr), std::filesystem::path("."));
}

TEST(Dispatch, EigenWritesArtifacts) {
    const auto dir = std::filesystem::temp_directory_path() / "gbulab_test_eig";
    std::filesystem::remove_all(dir);
    const RunConfig c = parse_config(with_kind("eigen", 3, 4));
    const DispatchResult r = dispatch(c, dir, 1);
    EXPECT_TRUE(r.pass);
    EXPECT_TRUE(std::filesystem::exists(dir / "config.ini"));
    EXPECT_TRUE(std::filesystem::exists(dir / "eigen.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "eigenfunction.csv"));
    std::filesystem::remove_all(dir);
}

TEST(Dispatch, SimulateIsDeterministic) {
    const auto dir = std::filesystem::temp_directory_path() / "gbulab_test_sim";
    std::filesystem::remove_all(dir);
    const RunConfig c = parse_config(kMinimal);
    ASSERT_TRUE(dispatch(c, dir / "a", 1).pass);
    ASSERT_TRUE(dispatch(c, dir / "b", 1).pass);
    for (const char* f : {"trajectory.bin", "monitors.csv", "snapshot.bin", "config.ini"}) {
        const auto a = read_bytes((dir / "a" / f).string());
        const auto b = read_bytes((dir / "b" / f).string());
        EXPECT_EQ(a, b) << f;
    }
    std::filesystem::remove_all(dir);
}
