#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gbulab/grid.hpp"
#include "gbulab/problem.hpp"
#include "gbulab/trajectory.hpp"

namespace gbulab {

/// Explicit step-size control and termination thresholds.
struct StepControl {
    double theta = 0.5;            ///< safety factor in (0, 1]
    double dt_min = 1e-14;         ///< below this the run stops with a verdict
    double gbu_threshold = 1e3;    ///< G: stop once max |Du| >= G
    double t_end = 1.0;
    std::size_t snapshot_every = 0; ///< record a frame every k steps (0: first/last only)
    std::size_t monitor_every = 1;  ///< record monitors every k steps (final step always)
    std::size_t max_steps = 0;      ///< 0 = unlimited

    void validate() const;
};

enum class Verdict { Completed, GBUDetected, StalledStep };

std::string to_string(Verdict v);

struct ThresholdCrossing {
    double threshold = 0.0;
    double t = 0.0;
};

struct RunReport {
    Verdict verdict = Verdict::Completed;
    std::optional<double> t_detect;
    std::vector<ThresholdCrossing> crossings; ///< first time max |Du| reached each ladder rung
    std::size_t steps = 0;
    double final_time = 0.0;
    double smallest_dt = 0.0;
    double largest_dt = 0.0;
    double wall_seconds = 0.0;
    std::string message;
};

/// Optional monitoring requests for run().
struct RunOptions {
    /// Weight w for the monitor y(t) = integral of u * w (e.g. w = phi_1^alpha).
    std::optional<Field> y_weight;
    /// Additional thresholds whose first crossing times are recorded.
    std::vector<double> threshold_ladder;
    /// Times at which a frame is forced (steps are clipped to land on them).
    std::vector<double> output_times;
    /// Called after every accepted step with (t, dt, u_old, u_new).
    std::function<void(double, double, const Field&, const Field&)> observer;
};

struct RunResult {
    Trajectory trajectory;
    RunReport report;
};

/// theta * h^2 / (2 d (p-1) (W^2+eps)^{(p-2)/2} + h q (W^2+eps)^{(q-1)/2}),
/// W = max |Du|; +infinity when the denominator vanishes.
double stable_dt(const Grid& grid, double max_grad, const ProblemSpec& spec, const StepControl& control);
double stable_dt(const SolutionState& state, const ProblemSpec& spec, const StepControl& control);

/// One forward-Euler step of the regularized equation; boundary nodes stay pinned to g.
/// Throws PreconditionError for dt <= 0 and NumericalError on non-finite values.
SolutionState step(const SolutionState& state, const ProblemSpec& spec, double dt);

/// Integrate from u0 until t_end, gradient blow-up detection, or stall.
RunResult run(const GridPtr& grid, const ProblemSpec& spec, const StepControl& control, const RunOptions& options = {});

/// Same as run() but starting from a restored state (restart).
RunResult run_from(const SolutionState& start, const ProblemSpec& spec, const StepControl& control,
                   const RunOptions& options = {});

/// Two runs on the same grid advanced with a common dt sequence
/// (the minimum of both stable steps), as needed for ordering comparisons.
struct PairResult {
    RunResult first;
    RunResult second;
};
/// The optional observer sees (t, u_first, u_second) at t = 0 and after every common step.
using PairObserver = std::function<void(double, const Field&, const Field&)>;
PairResult run_lockstep(const GridPtr& grid, const ProblemSpec& first, const ProblemSpec& second,
                        const StepControl& control, const PairObserver& observer = {});

/// Max of |Du| without allocating the full field (1D fast path).
double max_gradient(const Grid& grid, std::span<const double> u);

} // namespace gbulab
