#include "gbulab/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gbulab/errors.hpp"
#include "gbulab/problem.hpp"

namespace gbulab {

namespace {

void check_phi_args(double s, double delta, double beta) {
    require(s >= 0.0, "phi: requires s >= 0");
    require(delta > 0.0, "phi: requires delta > 0");
    require(beta > 0.0 && beta < 1.0, "phi: requires 0 < beta < 1");
}

double comparison_rate(const BarrierData& d) { return (d.N + d.p - 3.0) / d.rho; }

// (X + eps)^{(p-2)/2} * B - [(X + eps)^{q/2} - eps^{q/2}], minimized over the two
// endpoints of the admissible range of X = |Dv|^2 (the expression is unimodal in X).
double worst_case(double slope, double grad_g, double bracket, double p, double q, double eps) {
    const double lo = std::max(slope - grad_g, 0.0);
    const double hi = slope + grad_g;
    const double eq = std::pow(eps, 0.5 * q);
    auto f = [&](double x) {
        const double y = x * x + eps;
        return std::pow(y, 0.5 * (p - 2.0)) * bracket - (std::pow(y, 0.5 * q) - eq);
    };
    return std::min(f(lo), f(hi));
}

std::vector<double> kappa_sweep(double p) { return {0.0, 0.5 * (p - 2.0), p - 2.0}; }

double compute_T0(const BarrierParams& b) {
    const auto& d = b.data;
    const double rate = std::pow(b.C * b.C * b.K * b.K + 1.0, 0.5 * d.q);
    const double room = phi(b.eta, b.delta, b.beta) + d.g_min - d.g_sup - b.C * (1.0 - std::exp(-b.K * b.eta));
    return room / rate;
}

} // namespace

double phi(double s, double delta, double beta) {
    check_phi_args(s, delta, beta);
    return s * std::pow(s + delta, -beta);
}

double phi_prime(double s, double delta, double beta) {
    check_phi_args(s, delta, beta);
    return ((1.0 - beta) * s + delta) * std::pow(s + delta, -beta - 1.0);
}

double phi_second(double s, double delta, double beta) {
    check_phi_args(s, delta, beta);
    return -beta * ((1.0 - beta) * s + 2.0 * delta) * std::pow(s + delta, -beta - 2.0);
}

double barrier_beta(double p, double q) { return 1.0 / (2.0 * (q - p + 2.0)); }

std::vector<ConstraintCheck> barrier_constraints(const BarrierParams& b) {
    const auto& d = b.data;
    const double delta = b.delta;
    const double eta = b.eta;
    const double beta = b.beta;
    std::vector<ConstraintCheck> out;
    auto add = [&](std::string name, double lhs, double rhs) { out.push_back({std::move(name), lhs, rhs, lhs >= rhs}); };

    add("delta_power", std::pow(4.0, d.p - d.q - 4.0) * beta,
        std::pow(delta, (d.q - d.p + 3.0) / (2.0 * (d.q - d.p + 2.0))));
    add("slope_dominates_grad_g", phi_prime(eta, delta, beta), d.grad_g);
    add("curvature_dominates_hess_g", beta * delta * std::pow(eta + delta, -beta - 2.0),
        4.0 * (d.p - 2.0 + std::sqrt(static_cast<double>(d.N))) * d.hess_g);
    add("collar_unit", 4.0 * std::pow(eta + delta, -2.0 * beta), 1.0);
    add("curvature_drift", beta * delta, (d.N + d.p - 3.0) * (eta + delta) * (eta + delta) / d.rho);
    out.push_back({"exp_rate", b.K, comparison_rate(d), b.K > comparison_rate(d)});
    return out;
}

bool admissible(const BarrierParams& params) {
    const auto checks = barrier_constraints(params);
    return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.ok; });
}

BarrierParams with_delta(const BarrierParams& params, double delta) {
    require(delta > 0.0, "with_delta: requires delta > 0");
    BarrierParams b = params;
    b.delta = delta;
    b.eta = delta;
    b.T0 = compute_T0(b);
    return b;
}

BarrierParams find_barrier_params(const BarrierData& data) {
    require(data.p > 2.0 && data.q > data.p - 1.0, "find_barrier_params: requires q > p - 1 > 1");
    require(data.rho > 0.0, "find_barrier_params: requires rho > 0");
    require(data.N >= 1, "find_barrier_params: requires N >= 1");
    require(data.grad_g >= 0.0 && data.hess_g >= 0.0, "find_barrier_params: g norms must be nonnegative");

    BarrierParams b;
    b.data = data;
    b.beta = barrier_beta(data.p, data.q);
    b.delta_power_bound =
        std::pow(std::pow(4.0, data.p - data.q - 4.0) * b.beta, 2.0 * (data.q - data.p + 2.0) / (data.q - data.p + 3.0));
    b.K = 2.0 * comparison_rate(data);
    const double M = std::max(data.u0_sup - data.g_sup, 0.0);
    if (M <= 0.0) {
        b.C = 1.0;
    } else if (data.u0_lip > 0.0) {
        b.C = M / (1.0 - std::exp(-b.K * M / data.u0_lip));
    } else {
        b.C = M;
    }

    auto ok = [&](double delta) { return admissible(with_delta(b, delta)); };
    double hi = data.rho;
    if (ok(hi)) return with_delta(b, hi);
    double lo = hi;
    int halvings = 0;
    while (!ok(lo)) {
        hi = lo;
        lo *= 0.5;
        if (++halvings > 1100 || lo == 0.0)
            throw NumericalError("NoAdmissibleParams: halving delta found no admissible value");
    }
    for (int it = 0; it < 200 && hi - lo > lo * 4.0 * std::numeric_limits<double>::epsilon(); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ok(mid))
            lo = mid;
        else
            hi = mid;
    }
    return with_delta(b, lo);
}

ResidualReport supersolution_residual(const BarrierParams& b, double eps, std::size_t points) {
    require(points >= 2, "supersolution_residual: needs at least 2 radial points");
    require(eps >= 0.0, "supersolution_residual: requires eps >= 0");
    const auto& d = b.data;
    const double sqrtN = std::sqrt(static_cast<double>(d.N));
    ResidualReport rep;
    rep.points = points;
    rep.min_residual = std::numeric_limits<double>::infinity();
    rep.min_diffusion = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points; ++i) {
        const double s = b.eta * static_cast<double>(i) / static_cast<double>(points - 1);
        const double d1 = phi_prime(s, b.delta, b.beta);
        const double d2 = phi_second(s, b.delta, b.beta);
        for (double kappa : kappa_sweep(d.p)) {
            const double bracket = -d2 - (d.N - 1.0 + kappa) * d1 / d.rho - sqrtN * d.hess_g - kappa * d.hess_g;
            const double r = worst_case(d1, d.grad_g, bracket, d.p, d.q, eps);
            rep.min_diffusion = std::min(rep.min_diffusion, bracket);
            if (r < rep.min_residual) {
                rep.min_residual = r;
                rep.s_at_min = s;
                rep.kappa_at_min = kappa;
            }
        }
    }
    return rep;
}

ResidualReport exp_barrier_residual(double C, double K, const BarrierData& d, double eps, double s_max,
                                    std::size_t points) {
    require(C > 0.0 && K > 0.0, "exp_barrier_residual: requires C > 0 and K > 0");
    require(points >= 2 && s_max > 0.0, "exp_barrier_residual: needs a nondegenerate radial grid");
    require(eps >= 0.0, "exp_barrier_residual: requires eps >= 0");
    const double sqrtN = std::sqrt(static_cast<double>(d.N));
    const double time_term = std::pow(C * C * K * K + 1.0, 0.5 * d.q);
    ResidualReport rep;
    rep.points = points;
    rep.min_residual = std::numeric_limits<double>::infinity();
    rep.min_diffusion = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points; ++i) {
        const double s = s_max * static_cast<double>(i) / static_cast<double>(points - 1);
        const double d1 = C * K * std::exp(-K * s);
        for (double kappa : kappa_sweep(d.p)) {
            const double bracket = d1 * (K - (d.N - 1.0 + kappa) / d.rho) - sqrtN * d.hess_g - kappa * d.hess_g;
            const double r = time_term + worst_case(d1, d.grad_g, bracket, d.p, d.q, eps);
            rep.min_diffusion = std::min(rep.min_diffusion, bracket);
            if (r < rep.min_residual) {
                rep.min_residual = r;
                rep.s_at_min = s;
                rep.kappa_at_min = kappa;
            }
        }
    }
    return rep;
}

double collar_lipschitz_bound(const BarrierParams& params) {
    return std::pow(params.delta, -params.beta) + params.data.grad_g;
}

BarrierCertificate certify_barrier(const BarrierData& data, std::span<const double> eps_list, std::size_t points,
                                   double s_max) {
    require(!eps_list.empty(), "certify_barrier: needs at least one eps");
    BarrierCertificate c;
    c.params = find_barrier_params(data);
    c.constraints = barrier_constraints(c.params);
    c.M2 = collar_lipschitz_bound(c.params);
    c.certified = admissible(c.params);
    for (double eps : eps_list) {
        BarrierCertificate::Entry e;
        e.eps = eps;
        e.supersolution = supersolution_residual(c.params, eps, points);
        e.comparison = exp_barrier_residual(c.params.C, c.params.K, data, eps, s_max, points);
        if (e.supersolution.min_residual < 0.0 || e.comparison.min_residual < 0.0) c.certified = false;
        c.entries.push_back(e);
    }
    return c;
}

} // namespace gbulab
