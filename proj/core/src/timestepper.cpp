#include "gbulab/timestepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "gbulab/errors.hpp"
#include "gbulab/operators.hpp"

namespace gbulab {

void StepControl::validate() const {
    require(theta > 0.0 && theta <= 1.0, "control: theta must lie in (0, 1]");
    require(dt_min > 0.0, "control: dt_min must be positive");
    require(gbu_threshold > 0.0, "control: gbu_threshold must be positive");
    require(t_end > 0.0 && std::isfinite(t_end), "control: t_end must be positive");
    require(monitor_every >= 1, "control: monitor_every must be >= 1");
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Completed: return "Completed";
    case Verdict::GBUDetected: return "GBUDetected";
    case Verdict::StalledStep: return "StalledStep";
    }
    return "Unknown";
}

double max_gradient(const Grid& grid, std::span<const double> u) {
    if (grid.dimension() == 2) return max_abs(gradient_magnitude(grid, u));
    const std::size_t n = grid.nx();
    const double h = grid.hx();
    double m = std::max(std::abs(-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h),
                        std::abs(3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h));
    for (std::size_t i = 1; i + 1 < n; ++i) m = std::max(m, std::abs(u[i + 1] - u[i - 1]) / (2.0 * h));
    return m;
}

double stable_dt(const Grid& grid, double max_grad, const ProblemSpec& spec, const StepControl& control) {
    const double h = grid.min_spacing();
    const double s = max_grad * max_grad + spec.eps;
    const double d = static_cast<double>(grid.dimension());
    const double denom = 2.0 * d * (spec.p - 1.0) * std::pow(s, 0.5 * (spec.p - 2.0)) +
                         h * spec.q * std::pow(s, 0.5 * (spec.q - 1.0));
    if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
    return control.theta * h * h / denom;
}

double stable_dt(const SolutionState& state, const ProblemSpec& spec, const StepControl& control) {
    return stable_dt(state.grid(), state.grad_inf(), spec, control);
}

namespace {

void advance_field(const Grid& grid, const RegularizedLaw& law, const Field& g, const Field& u, double dt, Field& rhs,
                   Field& out) {
    evaluate_rhs(grid, u, law, rhs);
    out.resize(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = grid.is_boundary(k) ? g[k] : u[k] + dt * rhs[k];
}

bool all_finite(const Field& f) {
    return std::all_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); });
}

// Advances one trajectory and records frames, monitors, and threshold crossings.
class Runner {
public:
    Runner(const SolutionState& start, const ProblemSpec& spec, const StepControl& control, const RunOptions& options)
        : grid_(start.grid_ptr()), spec_(spec), control_(control), options_(options),
          law_(spec.p, spec.q, spec.eps, spec.mu), u_(start.field()), t_(start.t()) {
        pow_q_ = Power(spec.q);
        spec_.validate(*grid_);
        control_.validate();
        require(boundary_mismatch(*grid_, u_, spec_.g) == 0.0, "run: start state is not pinned to g");
        weights_ = trapezoid_weights(*grid_);
        if (options_.y_weight) {
            require(options_.y_weight->size() == grid_->size(), "run: y weight does not match grid");
            y_weights_ = weights_;
            for (std::size_t k = 0; k < y_weights_.size(); ++k) y_weights_[k] *= (*options_.y_weight)[k];
        }
        ladder_ = options_.threshold_ladder;
        std::sort(ladder_.begin(), ladder_.end());
        crossed_.assign(ladder_.size(), false);
        outputs_ = options_.output_times;
        std::sort(outputs_.begin(), outputs_.end());

        result_.trajectory.grid = grid_;
        result_.trajectory.spec = spec_;
        ut_.assign(u_.size(), 0.0);
        grad_ = max_gradient(*grid_, u_);
        grad_prev_ = grad_;
        result_.trajectory.frames.push_back(Frame{t_, 0.0, 0, u_, ut_});
        push_monitor();
        note_crossings();
        result_.report.smallest_dt = std::numeric_limits<double>::infinity();
    }

    double grad() const { return grad_; }
    double grad_prev() const { return grad_prev_; }
    double t() const { return t_; }
    const Field& u() const { return u_; }
    std::size_t steps() const { return steps_; }
    bool over_threshold() const { return grad_ >= control_.gbu_threshold; }
    double proposed_dt() const { return stable_dt(*grid_, grad_, spec_, control_); }

    /// Next forced output time strictly after t, or +inf.
    double next_output() const {
        for (double to : outputs_)
            if (to > t_) return to;
        return std::numeric_limits<double>::infinity();
    }

    /// Advance by dt, landing exactly on `t_target` when given.
    void advance(double dt, double t_target) {
        advance_field(*grid_, law_, spec_.g, u_, dt, rhs_, next_);
        if (!all_finite(next_)) throw NumericalError("step produced non-finite values");
        for (std::size_t k = 0; k < u_.size(); ++k) ut_[k] = (next_[k] - u_[k]) / dt;

        double ut2 = 0.0;
        double src = 0.0;
        source_grad_sq(*grid_, u_, gsq_);
        for (std::size_t k = 0; k < u_.size(); ++k) {
            ut2 += weights_[k] * ut_[k] * ut_[k];
            src += weights_[k] * pow_q_(gsq_[k] + spec_.eps);
        }
        ut_acc_ += dt * ut2;
        src_acc_ += dt * src;

        if (options_.observer) options_.observer(t_target, dt, u_, next_);
        std::swap(u_, next_);
        t_ = t_target;
        ++steps_;
        result_.report.smallest_dt = std::min(result_.report.smallest_dt, dt);
        result_.report.largest_dt = std::max(result_.report.largest_dt, dt);
        last_dt_ = dt;
        grad_prev_ = grad_;
        grad_ = max_gradient(*grid_, u_);
        if (steps_ % control_.monitor_every == 0) push_monitor();
        const bool forced = std::find(outputs_.begin(), outputs_.end(), t_) != outputs_.end();
        if ((control_.snapshot_every > 0 && steps_ % control_.snapshot_every == 0) || forced) push_frame();
        note_crossings();
    }

    RunResult finish(Verdict verdict, std::string message, double wall) {
        if (result_.trajectory.monitors.back().t != t_) push_monitor();
        if (result_.trajectory.frames.back().step != steps_) push_frame();
        RunReport& r = result_.report;
        r.verdict = verdict;
        if (verdict == Verdict::GBUDetected) r.t_detect = t_;
        r.steps = steps_;
        r.final_time = t_;
        if (steps_ == 0) r.smallest_dt = 0.0;
        r.message = std::move(message);
        r.wall_seconds = wall;
        for (std::size_t k = 0; k < ladder_.size(); ++k)
            if (crossed_[k]) r.crossings.push_back(crossing_times_[k]);
        return std::move(result_);
    }

private:
    void push_monitor() {
        MonitorSample m;
        m.t = t_;
        m.max_u = *std::max_element(u_.begin(), u_.end());
        m.min_u = *std::min_element(u_.begin(), u_.end());
        m.grad_inf = grad_;
        if (!y_weights_.empty()) {
            double y = 0.0;
            for (std::size_t k = 0; k < u_.size(); ++k) y += y_weights_[k] * u_[k];
            m.y = y;
        }
        m.ut_l2_acc = ut_acc_;
        m.source_acc = src_acc_;
        result_.trajectory.monitors.push_back(m);
    }

    void push_frame() { result_.trajectory.frames.push_back(Frame{t_, last_dt_, steps_, u_, ut_}); }

    void note_crossings() {
        if (crossing_times_.size() != ladder_.size()) crossing_times_.resize(ladder_.size());
        for (std::size_t k = 0; k < ladder_.size(); ++k) {
            if (!crossed_[k] && grad_ >= ladder_[k]) {
                crossed_[k] = true;
                crossing_times_[k] = ThresholdCrossing{ladder_[k], t_};
            }
        }
    }

    GridPtr grid_;
    ProblemSpec spec_;
    StepControl control_;
    const RunOptions& options_;
    RegularizedLaw law_;
    Field u_, next_, rhs_, ut_, gsq_, weights_, y_weights_;
    Power pow_q_{1.0};
    double t_;
    double last_dt_ = 0.0;
    double grad_ = 0.0;
    double grad_prev_ = 0.0;
    double ut_acc_ = 0.0;
    double src_acc_ = 0.0;
    std::size_t steps_ = 0;
    std::vector<double> ladder_;
    std::vector<bool> crossed_;
    std::vector<ThresholdCrossing> crossing_times_;
    std::vector<double> outputs_;
    RunResult result_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

SolutionState step(const SolutionState& state, const ProblemSpec& spec, double dt) {
    require(dt > 0.0 && std::isfinite(dt), "step: dt must be positive");
    Field rhs, out;
    advance_field(state.grid(), RegularizedLaw(spec.p, spec.q, spec.eps, spec.mu), spec.g, state.field(), dt, rhs, out);
    if (!all_finite(out)) throw NumericalError("step produced non-finite values");
    return SolutionState(state.grid_ptr(), std::move(out), state.t() + dt);
}

RunResult run_from(const SolutionState& start, const ProblemSpec& spec, const StepControl& control,
                   const RunOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    Runner r(start, spec, control, options);
    const double t_end = control.t_end;
    while (true) {
        if (r.over_threshold()) return r.finish(Verdict::GBUDetected, "max |Du| reached the GBU threshold", seconds_since(t0));
        if (r.t() >= t_end) return r.finish(Verdict::Completed, "reached t_end", seconds_since(t0));
        if (control.max_steps > 0 && r.steps() >= control.max_steps)
            return r.finish(Verdict::StalledStep, "step budget exhausted", seconds_since(t0));
        double dt = r.proposed_dt();
        if (dt < control.dt_min) {
            if (r.grad() > r.grad_prev())
                return r.finish(Verdict::GBUDetected, "dt collapsed below dt_min while max |Du| grew", seconds_since(t0));
            return r.finish(Verdict::StalledStep, "dt collapsed below dt_min", seconds_since(t0));
        }
        double target = r.t() + dt;
        const double out = std::min(r.next_output(), t_end);
        if (target >= out) {
            dt = out - r.t();
            target = out;
        }
        try {
            r.advance(dt, target);
        } catch (const NumericalError& e) {
            return r.finish(Verdict::StalledStep, e.what(), seconds_since(t0));
        }
    }
}

RunResult run(const GridPtr& grid, const ProblemSpec& spec, const StepControl& control, const RunOptions& options) {
    require(grid != nullptr, "run: null grid");
    spec.validate(*grid);
    return run_from(SolutionState(grid, spec.u0, 0.0), spec, control, options);
}

PairResult run_lockstep(const GridPtr& grid, const ProblemSpec& first, const ProblemSpec& second,
                        const StepControl& control, const PairObserver& observer) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunOptions none;
    Runner a(SolutionState(grid, first.u0, 0.0), first, control, none);
    Runner b(SolutionState(grid, second.u0, 0.0), second, control, none);
    if (observer) observer(a.t(), a.u(), b.u());
    auto finish_both = [&](Verdict va, Verdict vb, const std::string& msg) {
        const double w = seconds_since(t0);
        return PairResult{a.finish(va, msg, w), b.finish(vb, msg, w)};
    };
    while (true) {
        const Verdict va = a.over_threshold() ? Verdict::GBUDetected : Verdict::Completed;
        const Verdict vb = b.over_threshold() ? Verdict::GBUDetected : Verdict::Completed;
        if (a.over_threshold() || b.over_threshold()) return finish_both(va, vb, "GBU threshold reached");
        if (a.t() >= control.t_end) return finish_both(va, vb, "reached t_end");
        if (control.max_steps > 0 && a.steps() >= control.max_steps)
            return finish_both(Verdict::StalledStep, Verdict::StalledStep, "step budget exhausted");
        double dt = std::min(a.proposed_dt(), b.proposed_dt());
        if (dt < control.dt_min) return finish_both(Verdict::StalledStep, Verdict::StalledStep, "dt collapsed");
        double target = a.t() + dt;
        if (target >= control.t_end) {
            dt = control.t_end - a.t();
            target = control.t_end;
        }
        try {
            a.advance(dt, target);
            b.advance(dt, target);
            if (observer) observer(a.t(), a.u(), b.u());
        } catch (const NumericalError& e) {
            return finish_both(Verdict::StalledStep, Verdict::StalledStep, e.what());
        }
    }
}

} // namespace gbulab
