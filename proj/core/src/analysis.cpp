#include "gbulab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gbulab/errors.hpp"
#include "gbulab/operators.hpp"

namespace gbulab {

double ComplianceReport::detail(const std::string& key) const {
    for (const auto& [k, v] : details)
        if (k == key) return v;
    return std::numeric_limits<double>::quiet_NaN();
}

void MarginTracker::offer(double margin, std::optional<std::size_t> node, std::optional<double> time) {
    if (!seen_ || margin < margin_) {
        seen_ = true;
        margin_ = margin;
        node_ = node;
        time_ = time;
    }
}

ComplianceReport MarginTracker::report(std::string name, double tol) const {
    ComplianceReport r;
    r.name = std::move(name);
    r.tolerance = tol;
    r.worst_margin = seen_ ? margin_ : 0.0;
    r.node = node_;
    r.time = time_;
    r.pass = r.worst_margin >= -tol;
    return r;
}

// ---------------------------------------------------------------- maximum principle

ComplianceReport max_principle_check(const Trajectory& traj, double c) {
    require(traj.grid != nullptr && !traj.frames.empty(), "max_principle_check: empty trajectory");
    const Grid& grid = *traj.grid;
    const Field& u0 = traj.initial().u;
    const double lo = *std::min_element(u0.begin(), u0.end());
    const double hi = *std::max_element(u0.begin(), u0.end());
    const double tol = c * grid.min_spacing();

    MarginTracker tracker;
    for (const Frame& f : traj.frames) {
        for (std::size_t k = 0; k < f.u.size(); ++k) tracker.offer(std::min(hi - f.u[k], f.u[k] - lo), k, f.t);
    }
    for (const MonitorSample& m : traj.monitors) tracker.offer(std::min(hi - m.max_u, m.min_u - lo), std::nullopt, m.t);
    ComplianceReport r = tracker.report("max_principle", tol);
    r.note("min_u0", lo);
    r.note("max_u0", hi);
    r.note("h", grid.min_spacing());
    r.message = r.pass ? "min u0 - c h <= u <= max u0 + c h at every recorded state"
                       : "u left [min u0, max u0] by more than c h";
    return r;
}

// ---------------------------------------------------------------- comparison principle

ComparisonMonitor::ComparisonMonitor(const Grid& grid, double c) : tol_(c * grid.min_spacing()) {}

void ComparisonMonitor::observe(double t, std::span<const double> u, std::span<const double> v) {
    require(u.size() == v.size(), "comparison: state sizes differ");
    ++count_;
    for (std::size_t k = 0; k < u.size(); ++k) tracker_.offer(v[k] - u[k], k, t);
}

ComplianceReport ComparisonMonitor::report() const {
    ComplianceReport r = tracker_.report("comparison", tol_);
    r.note("observations", static_cast<double>(count_));
    r.message = r.pass ? "u <= v + tol at every observed time" : "ordering u <= v violated beyond tolerance";
    return r;
}

void require_ordered_data(const Grid& grid, const ProblemSpec& u, const ProblemSpec& v) {
    require(u.u0.size() == grid.size() && v.u0.size() == grid.size(), "comparison: data does not match grid");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        require(u.u0[k] <= v.u0[k], "comparison: initial data are not ordered (u0 > v0 somewhere)");
        if (grid.is_boundary(k)) require(u.g[k] <= v.g[k], "comparison: boundary data are not ordered");
    }
}

ComplianceReport comparison_check(const Trajectory& u, const Trajectory& v, double c) {
    require(u.grid && v.grid && *u.grid == *v.grid, "comparison_check: trajectories live on different grids");
    require(!u.frames.empty() && !v.frames.empty(), "comparison_check: empty trajectory");
    require_ordered_data(*u.grid, u.spec, v.spec);
    ComparisonMonitor mon(*u.grid, c);
    std::size_t j = 0;
    for (const Frame& fu : u.frames) {
        while (j < v.frames.size() && v.frames[j].t < fu.t) ++j;
        if (j < v.frames.size() && v.frames[j].t == fu.t) mon.observe(fu.t, fu.u, v.frames[j].u);
    }
    require(mon.observations() > 0, "comparison_check: no frames at matching times");
    return mon.report();
}

ComplianceReport comparison_experiment(const GridPtr& grid, const ProblemSpec& u, const ProblemSpec& v,
                                       const StepControl& control, double c) {
    require(grid != nullptr, "comparison_experiment: null grid");
    require_ordered_data(*grid, u, v);
    ComparisonMonitor mon(*grid, c);
    PairResult pr = run_lockstep(grid, u, v, control,
                                 [&](double t, const Field& a, const Field& b) { mon.observe(t, a, b); });
    ComplianceReport r = mon.report();
    r.note("final_time", pr.first.report.final_time);
    r.note("steps", static_cast<double>(pr.first.report.steps));
    if (pr.first.report.verdict == Verdict::StalledStep) {
        r.pass = false;
        r.message = "lockstep run stalled: " + pr.first.report.message;
    }
    return r;
}

// ---------------------------------------------------------------- monotonicity inequality

namespace {

double norm(std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

// |a|^e a componentwise, with the value 0 at a = 0.
std::vector<double> power_map(std::span<const double> a, double e) {
    const double n = norm(a);
    std::vector<double> out(a.size(), 0.0);
    if (n == 0.0) return out;
    const double s = std::pow(n, e);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
    return out;
}

double raw_margin(std::span<const double> a, std::span<const double> b, double sigma) {
    const auto pa = power_map(a, sigma - 2.0);
    const auto pb = power_map(b, sigma - 2.0);
    const auto ha = power_map(a, 0.5 * (sigma - 2.0));
    const auto hb = power_map(b, 0.5 * (sigma - 2.0));
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        lhs += (pa[i] - pb[i]) * (a[i] - b[i]);
        const double d = ha[i] - hb[i];
        rhs += d * d;
    }
    return lhs - 4.0 / (sigma * sigma) * rhs;
}

} // namespace

double monotonicity_margin(std::span<const double> a, std::span<const double> b, double sigma) {
    require(a.size() == b.size() && !a.empty(), "monotonicity: vectors must have equal nonzero dimension");
    require(sigma > 1.0, "monotonicity: requires sigma > 1");
    return raw_margin(a, b, sigma);
}

double monotonicity_tolerance(std::span<const double> a, std::span<const double> b, double sigma) {
    return 1e-12 * (std::pow(norm(a), sigma) + std::pow(norm(b), sigma) + 1.0);
}

double monotonicity_lemma_check(std::span<const double> a, std::span<const double> b, double sigma) {
    require(sigma >= 2.0, "monotonicity_lemma_check: requires sigma >= 2");
    return monotonicity_margin(a, b, sigma);
}

double monotonicity_transformed_check(std::span<const double> a, std::span<const double> b, double sigma) {
    require(sigma > 1.0 && sigma < 2.0, "monotonicity_transformed_check: requires 1 < sigma < 2");
    const double m = sigma / (sigma - 1.0);
    const auto A = power_map(a, sigma - 2.0);
    const auto B = power_map(b, sigma - 2.0);
    return monotonicity_lemma_check(A, B, m);
}

MonotonicitySuite monotonicity_suite(std::size_t samples, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> comp(-10.0, 10.0);
    std::uniform_real_distribution<double> sig(2.0, 10.0);
    std::uniform_int_distribution<int> dim(1, 4);
    MonotonicitySuite out;
    out.samples = samples;
    out.worst_scaled_margin = std::numeric_limits<double>::infinity();
    std::vector<double> a, b;
    for (std::size_t s = 0; s < samples; ++s) {
        const int d = dim(rng);
        a.resize(static_cast<std::size_t>(d));
        b.resize(static_cast<std::size_t>(d));
        for (auto& x : a) x = comp(rng);
        for (auto& x : b) x = comp(rng);
        const double sigma = sig(rng);
        const double m = monotonicity_lemma_check(a, b, sigma);
        const double tol = monotonicity_tolerance(a, b, sigma);
        if (m < -tol) ++out.violations;
        out.worst_scaled_margin = std::min(out.worst_scaled_margin, m / (tol * 1e12));
        out.sigma2_max_abs = std::max(out.sigma2_max_abs, std::abs(monotonicity_lemma_check(a, b, 2.0)));
    }
    return out;
}

// ---------------------------------------------------------------- regularizing effect

RegularizingMonitor::RegularizingMonitor(const Grid& grid, const ProblemSpec& spec, std::size_t warmup, double tol)
    : grid_(grid), spec_(spec), warmup_(warmup), tol_(tol) {
    require(spec.p > 2.0, "regularizing effect: requires p > 2");
    u0_sup_ = max_abs(spec.u0);
}

void RegularizingMonitor::observe(double t, double dt, const Field& u_old, const Field& u_new) {
    ++step_;
    if (step_ < warmup_) return;
    const RegularizedLaw law(spec_.p, spec_.q, spec_.eps, spec_.mu);
    source_grad_sq(grid_, u_old, src_);
    const double scale = t * (spec_.p - 2.0);
    auto to_ratio = [&](double v) {
        if (u0_sup_ > 0.0) return v * scale / u0_sup_;
        return v > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    };
    ut_.resize(u_new.size());
    for (std::size_t k = 0; k < u_new.size(); ++k) ut_[k] = (u_new[k] - u_old[k]) / dt;
    const std::size_t nx = grid_.nx();
    for (std::size_t k = 0; k < u_new.size(); ++k) {
        if (grid_.is_boundary(k)) continue;
        // Hat-weighted average (1, 2, 1) / 4 along each axis.
        double avg = 0.25 * (ut_[k - 1] + 2.0 * ut_[k] + ut_[k + 1]);
        if (grid_.dimension() == 2) {
            const double lo = 0.25 * (ut_[k - nx - 1] + 2.0 * ut_[k - nx] + ut_[k - nx + 1]);
            const double hi = 0.25 * (ut_[k + nx - 1] + 2.0 * ut_[k + nx] + ut_[k + nx + 1]);
            avg = 0.25 * (lo + 2.0 * avg + hi);
        }
        max_mollified_ratio_ = std::max(max_mollified_ratio_, to_ratio(avg));
    }
    for (std::size_t k = 0; k < u_new.size(); ++k) {
        if (grid_.is_boundary(k)) continue;
        const double ut = ut_[k];
        const double diffusion = ut - law.source(src_[k]);
        const double ratio = to_ratio(ut);
        const double dratio = to_ratio(diffusion);
        if (ratio > max_ratio_) {
            max_ratio_ = ratio;
            node_ = k;
            time_ = t;
        }
        max_diffusion_ratio_ = std::max(max_diffusion_ratio_, dratio);
    }
}

ComplianceReport RegularizingMonitor::report() const {
    ComplianceReport r;
    r.name = "regularizing_effect";
    r.tolerance = tol_;
    // No observation yet (max at -inf) counts as ratio 0.
    auto seen = [](double v) { return v == -std::numeric_limits<double>::infinity() ? 0.0 : v; };
    const double mr = seen(max_ratio_);
    const double mm = seen(max_mollified_ratio_);
    const bool pointwise = 1.0 - mr >= -tol_;
    r.worst_margin = pointwise ? 1.0 - mr : 1.0 - mm;
    r.node = node_;
    r.time = time_;
    r.pass = r.worst_margin >= -tol_;
    r.note("max_ratio", mr);
    r.note("excess", std::max(0.0, mr - 1.0));
    r.note("max_mollified_ratio", mm);
    r.note("max_diffusion_ratio", seen(max_diffusion_ratio_));
    r.note("u0_sup", u0_sup_);
    r.note("warmup_steps", static_cast<double>(warmup_));
    if (pointwise)
        r.message = "u_t t (p-2) / sup|u0| <= 1 + tol after warm-up";
    else if (r.pass)
        r.message = "pointwise excess of u_t; the test-function average stays within the bound";
    else
        r.message = "u_t exceeds sup|u0| / ((p-2) t) beyond tolerance";
    return r;
}

ComplianceReport regularizing_effect_check(const Trajectory& traj, std::size_t warmup, double tol) {
    require(traj.grid != nullptr, "regularizing_effect_check: empty trajectory");
    RegularizingMonitor mon(*traj.grid, traj.spec, 0, tol);
    for (const Frame& f : traj.frames) {
        if (f.step < warmup || f.dt <= 0.0) continue;
        Field old(f.u.size());
        for (std::size_t k = 0; k < old.size(); ++k) old[k] = f.u[k] - f.dt * f.ut[k];
        mon.observe(f.t, f.dt, old, f.u);
    }
    ComplianceReport r = mon.report();
    for (auto& [k, v] : r.details)
        if (k == "warmup_steps") v = static_cast<double>(warmup);
    return r;
}

// ---------------------------------------------------------------- scaling

ProblemSpec scaled_spec(const ProblemSpec& spec, double lambda) {
    require(spec.p > 2.0, "scaled_spec: requires p > 2");
    require(lambda > 0.0, "scaled_spec: requires lambda > 0");
    const double g = 1.0 / (spec.p - 2.0);
    const double s = std::pow(lambda, g);
    ProblemSpec out = spec;
    for (double& x : out.u0) x *= s;
    for (double& x : out.g) x *= s;
    out.mu = spec.mu * std::pow(lambda, -(spec.q - spec.p + 1.0) * g);
    out.eps = spec.eps * std::pow(lambda, 2.0 * g);
    return out;
}

ComplianceReport scaling_transform_check(const GridPtr& grid, const ProblemSpec& spec, double lambda,
                                         const StepControl& control, std::size_t samples, double c) {
    require(grid != nullptr, "scaling_transform_check: null grid");
    require(lambda >= 1.0, "scaling_transform_check: requires lambda >= 1");
    require(samples >= 1, "scaling_transform_check: needs at least one matched time");
    const double T = control.t_end;
    const double s = std::pow(lambda, 1.0 / (spec.p - 2.0));

    std::vector<double> tv, tu;
    for (std::size_t k = 1; k <= samples; ++k) {
        tv.push_back(T * static_cast<double>(k) / static_cast<double>(samples));
        tu.push_back(lambda * tv.back());
    }
    StepControl cu = control;
    cu.t_end = lambda * T;
    RunOptions ou;
    ou.output_times = tu;
    RunResult base = run(grid, spec, cu, ou);
    if (base.report.final_time < cu.t_end)
        throw NumericalError("scaling_transform_check: time alignment failed, base run stopped at t = " +
                             std::to_string(base.report.final_time) + " (" + base.report.message + ")");
    RunOptions ov;
    ov.output_times = tv;
    RunResult scaled = run(grid, scaled_spec(spec, lambda), control, ov);
    if (scaled.report.final_time < T)
        throw NumericalError("scaling_transform_check: transformed run stopped early (" + scaled.report.message + ")");

    auto frame_at = [](const Trajectory& tr, double t) -> const Frame& {
        for (const Frame& f : tr.frames)
            if (f.t == t) return f;
        throw NumericalError("scaling_transform_check: no frame at a matched time");
    };
    const double h = grid->min_spacing();
    const double dt = std::max(base.report.largest_dt, scaled.report.largest_dt);
    const double bound = c * (h * h + dt);
    MarginTracker tracker;
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const Frame& fu = frame_at(base.trajectory, tu[k]);
        const Frame& fv = frame_at(scaled.trajectory, tv[k]);
        for (std::size_t i = 0; i < fu.u.size(); ++i) {
            const double d = std::abs(fv.u[i] - s * fu.u[i]);
            worst = std::max(worst, d);
            tracker.offer(bound - d, i, tv[k]);
        }
    }
    ComplianceReport r = tracker.report("scaling_transform", 0.0);
    r.note("lambda", lambda);
    r.note("max_discrepancy", worst);
    r.note("bound", bound);
    r.note("h", h);
    r.note("dt_max", dt);
    r.message = r.pass ? "v(t) matches l^g u(l t) within c (h^2 + dt)" : "scaled solution deviates beyond c (h^2 + dt)";
    return r;
}

// ---------------------------------------------------------------- energy

ComplianceReport energy_estimate(const Trajectory& traj, double tol) {
    require(traj.grid != nullptr && !traj.frames.empty() && !traj.monitors.empty(),
            "energy_estimate: empty trajectory");
    const Grid& grid = *traj.grid;
    const ProblemSpec& spec = traj.spec;
    const Field g0 = gradient_magnitude(grid, traj.initial().u);
    Field e0(g0.size());
    for (std::size_t k = 0; k < g0.size(); ++k) e0[k] = std::pow(g0[k] * g0[k] + spec.eps, 0.5 * spec.p);
    const double lhs = traj.monitors.back().ut_l2_acc;
    const double rhs = (2.0 / spec.p) * integrate(grid, e0) + 2.0 * spec.mu * spec.mu * traj.monitors.back().source_acc;
    ComplianceReport r;
    r.name = "energy_estimate";
    r.tolerance = tol * rhs;
    r.worst_margin = rhs - lhs;
    r.time = traj.monitors.back().t;
    r.pass = r.worst_margin >= -r.tolerance;
    r.note("ut_l2_sq", lhs);
    r.note("bound", rhs);
    r.note("ratio", rhs > 0.0 ? lhs / rhs : 0.0);
    r.message = r.pass ? "integral of u_t^2 within the energy bound" : "integral of u_t^2 exceeds the energy bound";
    return r;
}

} // namespace gbulab
