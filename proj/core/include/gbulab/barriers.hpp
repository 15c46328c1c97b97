#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gbulab {

/// phi(s) = s (s + delta)^{-beta} and its first two derivatives (s >= 0, delta > 0, 0 < beta < 1).
double phi(double s, double delta, double beta);
double phi_prime(double s, double delta, double beta);
double phi_second(double s, double delta, double beta);

/// Exponents, geometry and data norms entering the barrier construction.
/// u0_lip is a Lipschitz bound of u0 - g near the boundary; 0 means unknown,
/// in which case C is sized from u0_sup alone.
struct BarrierData {
    double p = 3.0;
    double q = 4.0;
    int N = 1;
    double rho = 0.5;     ///< exterior-sphere radius
    double grad_g = 0.0;  ///< sup |Dg|
    double hess_g = 0.0;  ///< sup |D^2 g|
    double g_sup = 0.0;   ///< sup |g|
    double g_min = 0.0;   ///< min g
    double u0_sup = 1.0;  ///< sup u0
    double u0_lip = 0.0;
};

/// Certified parameters of the radial supersolution v = phi(r - rho) + g
/// on the collar r - rho in [0, eta], and of the comparison function
/// (C^2 K^2 + 1)^{q/2} t + C (1 - exp(-K (r - rho))) + sup|g|.
struct BarrierParams {
    BarrierData data;
    double beta = 0.0;
    double delta = 0.0;
    double eta = 0.0;
    double K = 0.0;
    double C = 0.0;
    /// Largest T0 with (C^2K^2+1)^{q/2} T0 + C(1 - e^{-K eta}) + sup|g| <= phi(eta) + min g;
    /// nonpositive when no positive T0 satisfies it.
    double T0 = 0.0;
    /// Upper bound on delta from 4^{p-q-4} beta >= delta^{(q-p+3)/(2(q-p+2))}.
    double delta_power_bound = 0.0;
};

/// One admissibility inequality evaluated at the current parameters.
struct ConstraintCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = false;
};

/// beta = 1 / (2 (q - p + 2)).
double barrier_beta(double p, double q);

/// All inequalities required of (delta, eta = delta, beta, K):
/// the delta power bound, phi'(eta) >= |Dg|, the D^2 g bound at s = eta,
/// 4 (eta + delta)^{-2 beta} >= 1, the curvature drift bound, and K > (N+p-3)/rho.
std::vector<ConstraintCheck> barrier_constraints(const BarrierParams& params);
bool admissible(const BarrierParams& params);

/// Bisection on delta from delta = rho downward to the largest admissible value.
/// Throws PreconditionError unless q > p - 1 > 1 and rho > 0; throws
/// NumericalError (NoAdmissibleParams) if the bisection exhausts precision.
BarrierParams find_barrier_params(const BarrierData& data);

/// Same construction with delta = eta replaced (beta, K, C kept; T0 recomputed).
BarrierParams with_delta(const BarrierParams& params, double delta);

struct ResidualReport {
    double min_residual = 0.0;
    double s_at_min = 0.0;     ///< r - rho where the minimum occurs
    double kappa_at_min = 0.0;
    /// Minimum of the diffusion part alone (the bracket multiplying a(|Dv|^2)).
    double min_diffusion = 0.0;
    std::size_t points = 0;
};

/// Expanded-form residual -div(...) - source of phi(r - rho) + g on a uniform radial grid of
/// `points` nodes over r - rho in [0, eta], with worst-case g-norm bounds, for
/// kappa in {0, (p-2)/2, p-2}. Nonnegative minimum certifies the supersolution.
ResidualReport supersolution_residual(const BarrierParams& params, double eps, std::size_t points = 10000);

/// Residual of the comparison function (time term + diffusion - source) over
/// r - rho in [0, s_max] using the same kappa sweep; independent of t.
ResidualReport exp_barrier_residual(double C, double K, const BarrierData& data, double eps, double s_max = 1.0,
                                    std::size_t points = 10000);

/// Full certification: parameter search plus residuals for every eps.
struct BarrierCertificate {
    BarrierParams params;
    std::vector<ConstraintCheck> constraints;
    struct Entry {
        double eps = 0.0;
        ResidualReport supersolution;
        ResidualReport comparison;
    };
    std::vector<Entry> entries;
    double M2 = 0.0;
    bool certified = false; ///< all constraints hold and every residual minimum is >= 0
};

BarrierCertificate certify_barrier(const BarrierData& data, std::span<const double> eps_list,
                                   std::size_t points = 10000, double s_max = 1.0);

/// M2 = sup_{0<=s<=delta} phi'(s) + |Dg| = delta^{-beta} + |Dg|.
double collar_lipschitz_bound(const BarrierParams& params);

} // namespace gbulab
