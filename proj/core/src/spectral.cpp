#include "gbulab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gbulab/errors.hpp"

namespace gbulab {

Field negative_laplacian(const Grid& grid, std::span<const double> v) {
    require(v.size() == grid.size(), "negative_laplacian: field size does not match grid");
    Field out(grid.size(), 0.0);
    const std::size_t nx = grid.nx();
    const double ihx2 = 1.0 / (grid.hx() * grid.hx());
    if (grid.dimension() == 1) {
        for (std::size_t i = 1; i + 1 < nx; ++i) out[i] = (2.0 * v[i] - v[i - 1] - v[i + 1]) * ihx2;
        return out;
    }
    const std::size_t ny = grid.ny();
    const double ihy2 = 1.0 / (grid.hy() * grid.hy());
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            const std::size_t k = j * nx + i;
            out[k] = (2.0 * v[k] - v[k - 1] - v[k + 1]) * ihx2 + (2.0 * v[k] - v[k - nx] - v[k + nx]) * ihy2;
        }
    }
    return out;
}

namespace {

double dot(const Field& a, const Field& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

// Solves -Lap_h x = b on interior nodes (boundary entries of x are 0).
void solve_1d(const Grid& grid, const Field& b, Field& x) {
    const std::size_t n = grid.nx();
    const std::size_t m = n - 2;
    const double ih2 = 1.0 / (grid.hx() * grid.hx());
    // Thomas algorithm for diag 2/h^2, off-diagonals -1/h^2.
    std::vector<double> c(m), d(m);
    const double diag = 2.0 * ih2;
    const double off = -ih2;
    c[0] = off / diag;
    d[0] = b[1] / diag;
    for (std::size_t i = 1; i < m; ++i) {
        const double den = diag - off * c[i - 1];
        c[i] = off / den;
        d[i] = (b[i + 1] - off * d[i - 1]) / den;
    }
    x.assign(n, 0.0);
    x[m] = d[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) x[i + 1] = d[i] - c[i] * x[i + 2];
}

void solve_2d(const Grid& grid, const Field& b, Field& x) {
    // Conjugate gradients on the SPD interior system; x is used as the initial guess.
    const std::size_t size = grid.size();
    if (x.size() != size) x.assign(size, 0.0);
    Field r = b;
    Field ax = negative_laplacian(grid, x);
    for (std::size_t k = 0; k < size; ++k) r[k] = grid.is_boundary(k) ? 0.0 : b[k] - ax[k];
    Field d = r;
    double rr = dot(r, r);
    const double bb = dot(b, b);
    const double stop = 1e-28 * bb;
    for (std::size_t it = 0; it < 20 * size && rr > stop; ++it) {
        const Field ad = negative_laplacian(grid, d);
        const double a = rr / dot(d, ad);
        for (std::size_t k = 0; k < size; ++k) {
            x[k] += a * d[k];
            r[k] -= a * ad[k];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t k = 0; k < size; ++k) d[k] = r[k] + beta * d[k];
    }
}

void normalize_max(Field& v) {
    double m = 0.0;
    for (double x : v)
        if (std::abs(x) > std::abs(m)) m = x;
    if (m == 0.0) throw NumericalError("principal_eigenpair: iterate vanished");
    for (double& x : v) x /= m;
}

} // namespace

EigenData principal_eigenpair(const Grid& grid, double tol, std::size_t max_iterations) {
    require(tol > 0.0, "principal_eigenpair: requires tol > 0");
    EigenData e;
    // Start from the positive tent/bump-like vector (1 inside, 0 on the boundary).
    Field v(grid.size(), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (grid.is_boundary(k)) continue;
        double w = 1.0;
        for (int a = 0; a < grid.dimension(); ++a) {
            const std::size_t i = a == 0 ? grid.ix(k) : grid.jy(k);
            const double s = static_cast<double>(i) / static_cast<double>(grid.points(a) - 1);
            w *= s * (1.0 - s);
        }
        v[k] = w;
    }
    normalize_max(v);
    Field next;
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        if (grid.dimension() == 1)
            solve_1d(grid, v, next);
        else {
            next = v;
            solve_2d(grid, v, next);
        }
        normalize_max(next);
        v.swap(next);
        const Field av = negative_laplacian(grid, v);
        e.lambda = dot(v, av) / dot(v, v);
        double res = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k)
            if (!grid.is_boundary(k)) res = std::max(res, std::abs(av[k] - e.lambda * v[k]));
        e.residual = res;
        e.iterations = it;
        if (res <= tol * e.lambda) {
            for (std::size_t k = 0; k < v.size(); ++k)
                if (grid.is_boundary(k)) v[k] = 0.0;
            e.phi = std::move(v);
            return e;
        }
    }
    throw NumericalError("principal_eigenpair: no convergence after " + std::to_string(max_iterations) + " iterations");
}

AlphaWindow alpha_window(double p, double q) {
    require(p > 2.0 && q > p, "alpha_window: requires q > p > 2 (hypothesis of the blow-up criterion)");
    AlphaWindow w;
    w.lo = (p - 1.0) / (q - p + 1.0);
    w.hi = q - 1.0;
    if (w.lo < 1.0) {
        w.lo = 1.0;
        w.lo_included = true;
    }
    if (!(w.lo < w.hi))
        throw NumericalError("EmptyWindow: (p-1)/(q-p+1) >= q-1, the blow-up criterion does not apply to p = " +
                             std::to_string(p) + ", q = " + std::to_string(q));
    return w;
}

Field blowup_weight(std::span<const double> phi, double alpha) {
    Field w(phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) w[k] = phi[k] > 0.0 ? std::pow(phi[k], alpha) : 0.0;
    return w;
}

double blowup_functional(const Grid& grid, std::span<const double> u, std::span<const double> phi, double alpha) {
    require(u.size() == grid.size() && phi.size() == grid.size(), "blowup_functional: field sizes do not match grid");
    const Field w = blowup_weight(phi, alpha);
    Field f(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) f[k] = u[k] * w[k];
    return integrate(grid, f);
}

std::string to_string(FitStatus s) {
    switch (s) {
    case FitStatus::Compliant: return "Compliant";
    case FitStatus::NonCompliant: return "NonCompliant";
    case FitStatus::Degenerate: return "Degenerate";
    }
    return "Unknown";
}

BlowupFit blowup_ode_fit(std::span<const double> t, std::span<const double> y, double q) {
    require(t.size() == y.size(), "blowup_ode_fit: t and y differ in length");
    require(y.size() >= 11, "blowup_ode_fit: needs at least 10 differenced samples");
    for (std::size_t i = 1; i < t.size(); ++i) require(t[i] > t[i - 1], "blowup_ode_fit: t must be strictly increasing");
    BlowupFit fit;
    const std::size_t m = y.size() - 1;
    fit.samples = m;
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    if (*ymax - *ymin <= 1e-14 * std::max(1.0, std::abs(*ymax))) {
        fit.status = FitStatus::Degenerate;
        return fit;
    }
    std::vector<double> yp(m), yq(m);
    for (std::size_t i = 0; i < m; ++i) {
        yp[i] = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
        yq[i] = std::pow(y[i + 1], q);
    }
    // Lower convex hull (monotone chain) of the points (y^q, y').
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return yq[a] < yq[b] || (yq[a] == yq[b] && yp[a] < yp[b]);
    });
    std::vector<std::size_t> hull;
    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (yq[a] - yq[o]) * (yp[b] - yp[o]) - (yp[a] - yp[o]) * (yq[b] - yq[o]);
    };
    for (std::size_t k : order) {
        if (!hull.empty() && yq[hull.back()] == yq[k]) continue;
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), k) <= 0.0) hull.pop_back();
        hull.push_back(k);
    }
    if (hull.size() < 2) {
        fit.status = FitStatus::Degenerate;
        return fit;
    }
    // Hull slopes increase left to right; the last edge is the steepest supporting line.
    const std::size_t a = hull[hull.size() - 2];
    const std::size_t b = hull.back();
    const double slope = (yp[b] - yp[a]) / (yq[b] - yq[a]);
    fit.C1 = slope > 0.0 ? slope : 0.0;
    double c2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) c2 = std::max(c2, fit.C1 * yq[i] - yp[i]);
    fit.C2 = c2;
    double margin = INFINITY;
    for (std::size_t i = 0; i < m; ++i) margin = std::min(margin, (yp[i] - fit.C1 * yq[i]) + c2);
    fit.margin = margin;
    fit.status = (fit.C1 > 0.0 && margin >= 0.0) ? FitStatus::Compliant : FitStatus::NonCompliant;
    return fit;
}

CriterionResult criterion_experiment(const GridPtr& grid, const ProblemSpec& base, double alpha,
                                     const StepControl& control, const CriterionOptions& options) {
    require(grid != nullptr, "criterion_experiment: null grid");
    const AlphaWindow w = alpha_window(base.p, base.q);
    require(w.contains(alpha), "criterion_experiment: alpha outside the admissible window");
    require(options.a_lo >= 0.0 && options.a_hi > options.a_lo, "criterion_experiment: requires 0 <= a_lo < a_hi");
    require(options.rel_tol > 0.0, "criterion_experiment: requires rel_tol > 0");

    const EigenData eig = principal_eigenpair(*grid);
    const Field bump = sine_bump(*grid, 1.0);
    CriterionResult res;

    auto probe = [&](double a) {
        ProblemSpec s = base;
        s.u0 = s.g;
        for (std::size_t k = 0; k < s.u0.size(); ++k) s.u0[k] += a * bump[k];
        RunResult r = run(grid, s, control);
        CriterionProbe pr;
        pr.amplitude = a;
        pr.verdict = r.report.verdict;
        pr.t_detect = r.report.t_detect;
        pr.y0 = blowup_functional(*grid, s.u0, eig.phi, alpha);
        res.probes.push_back(pr);
        if (pr.verdict == Verdict::StalledStep)
            throw NumericalError("criterion_experiment: inconclusive probe at A = " + std::to_string(a) + ": " +
                                 r.report.message);
        return pr;
    };

    CriterionProbe lo = probe(options.a_lo);
    CriterionProbe hi = probe(options.a_hi);
    if (lo.verdict != Verdict::Completed || hi.verdict != Verdict::GBUDetected)
        throw NumericalError("criterion_experiment: bracket does not straddle the blow-up threshold");
    for (std::size_t it = 0; it < options.max_iterations && hi.amplitude - lo.amplitude > options.rel_tol * hi.amplitude;
         ++it) {
        CriterionProbe mid = probe(0.5 * (lo.amplitude + hi.amplitude));
        if (mid.verdict == Verdict::GBUDetected)
            hi = mid;
        else
            lo = mid;
    }
    res.a_lo = lo.amplitude;
    res.a_hi = hi.amplitude;
    res.y0_lo = lo.y0;
    res.y0_threshold = hi.y0;
    res.t_detect = hi.t_detect;
    return res;
}

} // namespace gbulab
