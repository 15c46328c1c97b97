#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gbulab/analysis.hpp"
#include "gbulab/errors.hpp"
#include "gbulab/operators.hpp"

namespace gbulab {

double profile_exponent(double p, double q) {
    require(q > p - 1.0, "profile_exponent: requires q > p - 1");
    return 1.0 / (q - p + 1.0);
}

std::vector<ShellRow> shell_profile(const Grid& grid, std::span<const double> u, double gamma, double C1, double C2) {
    const Field delta = boundary_distance(grid);
    const Field grad = gradient_magnitude(grid, u);
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return delta[a] < delta[b]; });
    std::vector<ShellRow> rows;
    for (std::size_t k : order) {
        const double d = delta[k];
        if (d <= 0.0) continue;
        if (rows.empty() || d - rows.back().delta > 1e-12 * std::max(1.0, d)) {
            rows.push_back({d, grad[k], C1 * std::pow(d, -gamma) + C2});
        } else {
            rows.back().max_grad = std::max(rows.back().max_grad, grad[k]);
        }
    }
    return rows;
}

ProfileFrame fit_profile(const Grid& grid, std::span<const double> u, double t, double p, double q, double C2,
                         const ProfileOptions& options) {
    const double gamma = profile_exponent(p, q);
    ProfileFrame f;
    f.t = t;
    const Field delta = boundary_distance(grid);
    const Field grad = gradient_magnitude(grid, u);
    double c1 = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (delta[k] > 0.0) c1 = std::max(c1, (grad[k] - C2) * std::pow(delta[k], gamma));
    f.C1 = c1;

    const auto rows = shell_profile(grid, u, gamma, 0.0, 0.0);
    std::size_t K = rows.empty() ? 0 : 1;
    while (K < rows.size() && rows[K].delta <= options.layer_depth && rows[K].max_grad < rows[K - 1].max_grad) ++K;
    f.shells = K;
    if (K < options.min_shells) {
        f.status = ProfileStatus::InsufficientCollar;
        f.slope = std::numeric_limits<double>::quiet_NaN();
        return f;
    }
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        sx += std::log(rows[i].delta);
        sy += std::log(rows[i].max_grad);
    }
    const double mx = sx / static_cast<double>(K);
    const double my = sy / static_cast<double>(K);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        const double dx = std::log(rows[i].delta) - mx;
        sxy += dx * (std::log(rows[i].max_grad) - my);
        sxx += dx * dx;
    }
    f.slope = sxy / sxx;
    f.status = ProfileStatus::Resolved;
    return f;
}

double relative_spread(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double scale = std::max(std::abs(*lo), std::abs(*hi));
    return scale > 0.0 ? (*hi - *lo) / scale : 0.0;
}

ProfileCheck gradient_profile_check(const Grid& grid, std::span<const Frame> frames, double p, double q, double C2,
                                    const ProfileOptions& options) {
    const double gamma = profile_exponent(p, q);
    ProfileCheck out;
    out.C2 = C2;
    std::vector<double> c1s, slopes;
    for (const Frame& fr : frames) {
        ProfileFrame f = fit_profile(grid, fr.u, fr.t, p, q, C2, options);
        if (f.status == ProfileStatus::Resolved) {
            c1s.push_back(f.C1);
            slopes.push_back(f.slope);
        }
        out.frames.push_back(f);
    }
    ComplianceReport& r = out.report;
    r.name = "gradient_profile";
    r.tolerance = options.slope_tol;
    r.note("gamma", gamma);
    r.note("frames", static_cast<double>(frames.size()));
    r.note("resolved_frames", static_cast<double>(c1s.size()));
    if (c1s.size() < options.min_frames) {
        r.pass = false;
        r.worst_margin = -std::numeric_limits<double>::infinity();
        r.message = "InsufficientCollar: too few frames resolve the boundary layer";
        return out;
    }
    out.C1 = *std::max_element(c1s.begin(), c1s.end());
    double worst = std::numeric_limits<double>::infinity();
    for (const ProfileFrame& f : out.frames) {
        if (f.status != ProfileStatus::Resolved) continue;
        if (f.slope + gamma < worst) {
            worst = f.slope + gamma;
            r.time = f.t;
        }
    }
    r.worst_margin = worst;
    const double c1_spread = relative_spread(c1s);
    const double slope_spread = relative_spread(slopes);
    r.note("C1", out.C1);
    r.note("C2", C2);
    r.note("C1_spread", c1_spread);
    r.note("slope_spread", slope_spread);
    r.note("min_slope", *std::min_element(slopes.begin(), slopes.end()));
    r.note("max_slope", *std::max_element(slopes.begin(), slopes.end()));
    const bool slope_ok = worst >= -options.slope_tol;
    const bool stable = c1_spread <= options.stability && slope_spread <= options.stability;
    r.pass = slope_ok && stable;
    if (!slope_ok)
        r.message = "shell slope steeper than -gamma - slope_tol";
    else if (!stable)
        r.message = "fitted C1 or shell slope not stable across frames";
    else
        r.message = "profile bound and shell slope consistent across frames";
    return out;
}

InteriorMonitor::InteriorMonitor(const Grid& grid, double d0) : grid_(grid), d0_(d0) {
    require(d0 > 0.0, "interior region must stay a positive distance away from the boundary");
    const Field delta = boundary_distance(grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (delta[k] >= d0) nodes_.push_back(k);
    require(!nodes_.empty(), "interior region at distance >= d0 contains no nodes");
}

void InteriorMonitor::observe(double t, std::span<const double> u) {
    const Field grad = gradient_magnitude(grid_, u);
    for (std::size_t k : nodes_) {
        if (grad[k] > sup_) {
            sup_ = grad[k];
            t_sup_ = t;
            node_sup_ = k;
        }
    }
}

ComplianceReport interior_boundedness_check(const InteriorMonitor& monitor, double gamma, double C1, double C2) {
    const double bound = C1 * std::pow(monitor.d0(), -gamma) + C2;
    ComplianceReport r;
    r.name = "interior_boundedness";
    r.worst_margin = bound - monitor.sup();
    r.node = monitor.node_of_sup();
    r.time = monitor.time_of_sup();
    r.pass = r.worst_margin >= 0.0;
    r.note("d0", monitor.d0());
    r.note("sup_grad", monitor.sup());
    r.note("bound", bound);
    r.message = r.pass ? "|Du| on the interior region stays below C1 d0^{-gamma} + C2"
                       : "interior gradient exceeds the profile bound";
    return r;
}

ComplianceReport interior_boundedness_check(const Trajectory& traj, double d0, double gamma, double C1, double C2) {
    require(traj.grid != nullptr, "interior_boundedness_check: empty trajectory");
    InteriorMonitor mon(*traj.grid, d0);
    for (const Frame& f : traj.frames) mon.observe(f.t, f.u);
    return interior_boundedness_check(mon, gamma, C1, C2);
}

} // namespace gbulab
