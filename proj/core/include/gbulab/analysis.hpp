#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gbulab/grid.hpp"
#include "gbulab/problem.hpp"
#include "gbulab/timestepper.hpp"
#include "gbulab/trajectory.hpp"

namespace gbulab {

/// Outcome of one compliance check. pass <=> worst_margin >= -tolerance,
/// where the margin is (bound - observed) and negative values are violations.
struct ComplianceReport {
    std::string name;
    bool pass = true;
    double worst_margin = 0.0;
    std::optional<std::size_t> node;
    std::optional<double> time;
    double tolerance = 0.0;
    std::vector<std::pair<std::string, double>> details;
    std::string message;

    void note(std::string key, double value) { details.emplace_back(std::move(key), value); }
    /// Looks up a detail by key (NaN when absent).
    double detail(const std::string& key) const;
};

/// Tracks the most negative margin seen so far together with its location.
class MarginTracker {
public:
    void offer(double margin, std::optional<std::size_t> node, std::optional<double> time);
    bool empty() const { return !seen_; }
    double margin() const { return margin_; }
    std::optional<std::size_t> node() const { return node_; }
    std::optional<double> time() const { return time_; }
    /// Fills name, margin, location and pass/fail against tol.
    ComplianceReport report(std::string name, double tol) const;

private:
    bool seen_ = false;
    double margin_ = 0.0;
    std::optional<std::size_t> node_;
    std::optional<double> time_;
};

// ---------------------------------------------------------------- maximum principle

/// min u0 - tol <= u <= max u0 + tol with tol = c * h, over every frame (node level)
/// and every monitor sample (value level) of the trajectory.
ComplianceReport max_principle_check(const Trajectory& traj, double c = 2.0);

// ---------------------------------------------------------------- comparison principle

/// Streaming form of the ordering check u <= v + tol, fed with matched states.
class ComparisonMonitor {
public:
    ComparisonMonitor(const Grid& grid, double c = 2.0);
    void observe(double t, std::span<const double> u, std::span<const double> v);
    ComplianceReport report() const;
    std::size_t observations() const { return count_; }

private:
    double tol_;
    std::size_t count_ = 0;
    MarginTracker tracker_;
};

/// Throws PreconditionError unless u0 <= v0 everywhere and g_u <= g_v on the boundary.
void require_ordered_data(const Grid& grid, const ProblemSpec& u, const ProblemSpec& v);

/// Ordering u <= v + c h over frames recorded at identical times (lockstep runs).
ComplianceReport comparison_check(const Trajectory& u, const Trajectory& v, double c = 2.0);

/// Runs both problems with a common dt sequence and checks the ordering after every step.
ComplianceReport comparison_experiment(const GridPtr& grid, const ProblemSpec& u, const ProblemSpec& v,
                                       const StepControl& control, double c = 2.0);

// ---------------------------------------------------------------- monotonicity inequality

/// <|a|^{s-2} a - |b|^{s-2} b, a - b> - (4/s^2) | |a|^{(s-2)/2} a - |b|^{(s-2)/2} b |^2.
double monotonicity_margin(std::span<const double> a, std::span<const double> b, double sigma);

/// Acceptance threshold 1e-12 (|a|^s + |b|^s + 1) for monotonicity_margin.
double monotonicity_tolerance(std::span<const double> a, std::span<const double> b, double sigma);

/// Requires sigma >= 2. Returns the signed margin; callers compare against monotonicity_tolerance.
double monotonicity_lemma_check(std::span<const double> a, std::span<const double> b, double sigma);

/// For sigma in (1, 2): the same inequality with exponent m = sigma / (sigma - 1) applied to
/// A = |a|^{sigma-2} a and B = |b|^{sigma-2} b.
double monotonicity_transformed_check(std::span<const double> a, std::span<const double> b, double sigma);

struct MonotonicitySuite {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_scaled_margin = 0.0;  ///< min of margin / (|a|^s + |b|^s + 1)
    double sigma2_max_abs = 0.0;       ///< max |margin| over the sigma = 2 identity samples
};

/// Random (a, b, sigma) with sigma in [2, 10], dims 1..4, components in [-10, 10],
/// plus `samples` sigma = 2 identity checks; deterministic for a fixed seed.
MonotonicitySuite monotonicity_suite(std::size_t samples, unsigned long long seed);

// ---------------------------------------------------------------- regularizing effect

/// Streaming check of u_t * t * (p-2) / sup|u0| <= 1 + tol from step `warmup` on,
/// using the backward difference of every accepted step. Also tracks the
/// diffusion part u_t - source, which the bound controls a fortiori.
/// A pointwise excess is weighed against the same ratio for u_t averaged with a
/// hat test function of support 2h per axis; the check fails only if both exceed.
class RegularizingMonitor {
public:
    RegularizingMonitor(const Grid& grid, const ProblemSpec& spec, std::size_t warmup = 5, double tol = 0.1);
    void observe(double t, double dt, const Field& u_old, const Field& u_new);
    ComplianceReport report() const;
    double max_ratio() const { return max_ratio_; }

private:
    const Grid& grid_;
    ProblemSpec spec_;
    std::size_t warmup_;
    double tol_;
    double u0_sup_;
    std::size_t step_ = 0;
    double max_ratio_ = -std::numeric_limits<double>::infinity();
    double max_diffusion_ratio_ = -std::numeric_limits<double>::infinity();
    double max_mollified_ratio_ = -std::numeric_limits<double>::infinity();
    std::optional<std::size_t> node_;
    std::optional<double> time_;
    Field src_;
    Field ut_;
};

/// Same check over the recorded frames (each frame's u_t is its own backward difference).
ComplianceReport regularizing_effect_check(const Trajectory& traj, std::size_t warmup = 5, double tol = 0.1);

// ---------------------------------------------------------------- gradient profile

/// gamma* = 1 / (q - p + 1).
double profile_exponent(double p, double q);

struct ShellRow {
    double delta = 0.0;
    double max_grad = 0.0;
    double bound_value = 0.0;
};

/// Max |Du| on every level set of the boundary distance (delta > 0), ascending in delta,
/// with bound_value = C1 delta^{-gamma} + C2.
std::vector<ShellRow> shell_profile(const Grid& grid, std::span<const double> u, double gamma, double C1, double C2);

enum class ProfileStatus { Resolved, InsufficientCollar };

struct ProfileFrame {
    double t = 0.0;
    double C1 = 0.0;            ///< minimal C1 with |Du| <= C1 delta^{-gamma} + C2 at every node with delta > 0
    double slope = 0.0;         ///< least-squares log-log slope over the boundary-layer shells
    std::size_t shells = 0;     ///< shells in the monotone boundary layer
    ProfileStatus status = ProfileStatus::InsufficientCollar;
};

struct ProfileOptions {
    double slope_tol = 0.15;
    double stability = 0.2;    ///< allowed relative spread of C1 and of the slope across frames
    double layer_depth = 1.0 / 3.0; ///< shells deeper than this are not part of the boundary layer
    std::size_t min_shells = 4;
    std::size_t min_frames = 3;
};

/// Single-state fit. The layer consists of the shells from delta = h inward while the
/// shell maximum keeps decreasing; fewer than min_shells gives InsufficientCollar.
ProfileFrame fit_profile(const Grid& grid, std::span<const double> u, double t, double p, double q, double C2,
                         const ProfileOptions& options = {});

/// Relative spread (max - min) / max |v| of a set of values (0 for fewer than 2).
double relative_spread(std::span<const double> v);

struct ProfileCheck {
    ComplianceReport report;
    std::vector<ProfileFrame> frames;
    double C1 = 0.0;  ///< largest fitted C1 over the resolved frames
    double C2 = 0.0;
};

/// Fits every frame; passes when at least min_frames frames resolve the layer, every
/// resolved slope is >= -gamma - slope_tol, and C1 and slope vary by at most `stability`.
ProfileCheck gradient_profile_check(const Grid& grid, std::span<const Frame> frames, double p, double q, double C2,
                                    const ProfileOptions& options = {});

/// Streaming sup of |Du| over nodes with delta >= d0 (d0 > 0, region nonempty).
class InteriorMonitor {
public:
    InteriorMonitor(const Grid& grid, double d0);
    void observe(double t, std::span<const double> u);
    double sup() const { return sup_; }
    double time_of_sup() const { return t_sup_; }
    std::size_t node_of_sup() const { return node_sup_; }
    double d0() const { return d0_; }

private:
    const Grid& grid_;
    double d0_;
    std::vector<std::size_t> nodes_;
    double sup_ = 0.0;
    double t_sup_ = 0.0;
    std::size_t node_sup_ = 0;
};

/// sup over the region and over time of |Du| <= C1 d0^{-gamma} + C2.
ComplianceReport interior_boundedness_check(const InteriorMonitor& monitor, double gamma, double C1, double C2);
ComplianceReport interior_boundedness_check(const Trajectory& traj, double d0, double gamma, double C1, double C2);

// ---------------------------------------------------------------- scaling and energy

/// Transformed problem for u_l(x, t) = l^g u(x, l t), g = 1/(p-2): data scaled by l^g,
/// mu by l^{-(q-p+1) g} and eps by l^{2g} so that the regularized equation is covariant.
ProblemSpec scaled_spec(const ProblemSpec& spec, double lambda);

/// Runs spec up to lambda * t_end and the transformed problem up to t_end, and compares
/// v(t_k) with l^g u(l t_k) at `samples` matched times t_k = k t_end / samples;
/// passes when the discrepancy is <= c (h^2 + dt_max).
ComplianceReport scaling_transform_check(const GridPtr& grid, const ProblemSpec& spec, double lambda,
                                         const StepControl& control, std::size_t samples = 5, double c = 5.0);

/// Integral of u_t^2 over the run against (2/p) int (|Du0|^2+eps)^{p/2} + 2 mu^2 int int (|Du|^2+eps)^q.
ComplianceReport energy_estimate(const Trajectory& traj, double tol = 0.0);

} // namespace gbulab
