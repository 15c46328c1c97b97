#include "gbulab/gbu_detect.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gbulab/errors.hpp"
#include "gbulab/parallel.hpp"

namespace gbulab {

std::string to_string(GbuVerdict v) {
    switch (v) {
    case GbuVerdict::GBU: return "GBU";
    case GbuVerdict::NoGBU: return "NoGBU";
    case GbuVerdict::Inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

namespace {

GbuAssessment inconclusive(GbuAssessment a, std::string why) {
    a.verdict = GbuVerdict::Inconclusive;
    a.t_max.reset();
    a.reason = std::move(why);
    return a;
}

} // namespace

GbuAssessment detect_gbu(std::span<const GbuSample> samples, const GbuDetectOptions& options) {
    require(samples.size() >= 2, "detect_gbu: needs at least two runs");
    require(options.contraction > 0.0 && options.contraction < 1.0, "detect_gbu: contraction must lie in (0, 1)");
    GbuAssessment out;

    std::size_t completed = 0, detected = 0, stalled = 0;
    for (const auto& s : samples) {
        if (s.verdict == Verdict::Completed) ++completed;
        if (s.verdict == Verdict::GBUDetected) ++detected;
        if (s.verdict == Verdict::StalledStep) ++stalled;
    }
    if (completed == samples.size()) {
        out.verdict = GbuVerdict::NoGBU;
        out.reason = "every run completed with the gradient below its threshold";
        return out;
    }
    if (stalled > 0) return inconclusive(out, "a run stalled (scheme failure, not blow-up)");
    if (completed > 0) return inconclusive(out, "runs disagree: some completed, some crossed the threshold");

    std::map<std::size_t, std::vector<std::pair<double, double>>> by_res;
    double t_lo = INFINITY, t_hi = 0.0;
    for (const auto& s : samples) {
        require(s.t_detect.has_value(), "detect_gbu: GBUDetected sample without T_detect");
        by_res[s.resolution].emplace_back(s.threshold, *s.t_detect);
        t_lo = std::min(t_lo, *s.t_detect);
        t_hi = std::max(t_hi, *s.t_detect);
    }
    out.spread = t_lo > 0.0 ? (t_hi - t_lo) / t_lo : INFINITY;

    for (auto& [res, pts] : by_res) {
        std::sort(pts.begin(), pts.end());
        GbuLevel lvl;
        lvl.resolution = res;
        for (auto [g, t] : pts) {
            lvl.thresholds.push_back(g);
            lvl.t_detect.push_back(t);
        }
        out.levels.push_back(lvl);
    }

    for (auto& lvl : out.levels) {
        if (lvl.t_detect.size() < 3)
            return inconclusive(out, "resolution " + std::to_string(lvl.resolution) + " lacks the G, 2G, 4G ladder");
        const std::size_t m = lvl.t_detect.size();
        const double d1 = lvl.t_detect[m - 2] - lvl.t_detect[m - 3];
        const double d2 = lvl.t_detect[m - 1] - lvl.t_detect[m - 2];
        if (d1 < 0.0 || d2 < 0.0)
            return inconclusive(out, "T_detect decreases with the threshold at resolution " + std::to_string(lvl.resolution));
        if (d2 == 0.0) {
            lvl.ratio = 0.0;
            lvl.t_max = lvl.t_detect[m - 1];
        } else {
            if (d1 == 0.0 || d2 > options.contraction * d1)
                return inconclusive(out, "increments do not contract at resolution " + std::to_string(lvl.resolution));
            lvl.ratio = d2 / d1;
            lvl.t_max = lvl.t_detect[m - 1] + d2 * lvl.ratio / (1.0 - lvl.ratio);
        }
        lvl.cauchy = true;
    }

    double lo = INFINITY, hi = 0.0;
    for (const auto& lvl : out.levels) {
        lo = std::min(lo, lvl.t_max);
        hi = std::max(hi, lvl.t_max);
    }
    if (hi - lo > options.agreement * hi) return inconclusive(out, "extrapolated T_max disagrees across resolutions");

    out.verdict = GbuVerdict::GBU;
    out.t_max = out.levels.back().t_max;
    out.reason = "bounded increasing T_detect with contracting increments on every grid";
    return out;
}

EpsContinuationReport epsilon_continuation(const GridPtr& grid, const ProblemSpec& spec, std::span<const double> eps_list,
                                           const StepControl& control, std::size_t jobs) {
    require(eps_list.size() >= 3, "epsilon_continuation: needs at least 3 eps values");
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        require(eps_list[k] >= 0.0, "epsilon_continuation: eps must be nonnegative");
        if (k > 0) require(eps_list[k] < eps_list[k - 1], "epsilon_continuation: eps list must be strictly decreasing");
    }
    const std::size_t m = eps_list.size();
    EpsContinuationReport rep;
    rep.eps.assign(eps_list.begin(), eps_list.end());
    rep.final_fields.resize(m);
    rep.final_times.resize(m);
    std::vector<RunReport> reports(m);

    parallel_for(m, jobs, [&](std::size_t k) {
        ProblemSpec s = spec;
        s.eps = eps_list[k];
        RunResult r = run(grid, s, control);
        rep.final_fields[k] = r.trajectory.last().u;
        rep.final_times[k] = r.report.final_time;
        reports[k] = std::move(r.report);
    });
    for (std::size_t k = 0; k < m; ++k) {
        if (reports[k].verdict != Verdict::Completed)
            throw NumericalError("epsilon_continuation: run with eps = " + std::to_string(eps_list[k]) + " ended with " +
                                 to_string(reports[k].verdict) + ": " + reports[k].message);
    }

    for (std::size_t k = 0; k + 1 < m; ++k) {
        double d = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i)
            d = std::max(d, std::abs(rep.final_fields[k][i] - rep.final_fields[k + 1][i]));
        rep.distances.push_back(d);
    }
    rep.monotone = true;
    for (std::size_t k = 1; k < rep.distances.size(); ++k)
        if (!(rep.distances[k] < rep.distances[k - 1])) rep.monotone = false;

    const Field& last = rep.final_fields[m - 1];
    const Field& prev = rep.final_fields[m - 2];
    const double d_prev = rep.distances[rep.distances.size() - 2];
    const double d_last = rep.distances.back();
    rep.extrapolated = last;
    if (d_prev > 0.0 && d_last < d_prev) {
        const double r = d_last / d_prev;
        rep.rate = r;
        const double w = r / (1.0 - r);
        for (std::size_t i = 0; i < last.size(); ++i) rep.extrapolated[i] = last[i] + (last[i] - prev[i]) * w;
    }
    return rep;
}

} // namespace gbulab
