#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbulab/grid.hpp"
#include "gbulab/problem.hpp"
#include "gbulab/timestepper.hpp"

namespace gbulab {

/// Principal Dirichlet eigenpair of the discrete -Laplacian.
struct EigenData {
    double lambda = 0.0;
    Field phi;              ///< max-normalized, positive inside, zero on the boundary
    double residual = 0.0;  ///< sup |(-Lap_h - lambda) phi|
    std::size_t iterations = 0;
};

/// Inverse power iteration on the 3-point (1D) / 5-point (2D) Dirichlet Laplacian,
/// with a tridiagonal direct solve in 1D and conjugate gradients in 2D.
/// Stops once residual <= tol * lambda; throws NumericalError after max_iterations.
EigenData principal_eigenpair(const Grid& grid, double tol = 1e-10, std::size_t max_iterations = 500);

/// Applies the discrete -Laplacian to a field vanishing on the boundary
/// (boundary entries of the result are 0).
Field negative_laplacian(const Grid& grid, std::span<const double> v);

/// Admissible exponents alpha for the blow-up functional: the open interval
/// ((p-1)/(q-p+1), q-1) intersected with [1, inf).
struct AlphaWindow {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_included = false; ///< true when the lower end was raised to 1
    double midpoint() const { return 0.5 * (lo + hi); }
    bool contains(double alpha) const { return (lo_included ? alpha >= lo : alpha > lo) && alpha < hi; }
};

/// Requires q > p > 2. Throws NumericalError ("EmptyWindow") when the window is empty.
AlphaWindow alpha_window(double p, double q);

/// y = integral of u * phi^alpha by the trapezoid rule.
double blowup_functional(const Grid& grid, std::span<const double> u, std::span<const double> phi, double alpha);

/// Nodal weight phi^alpha used to monitor y(t) during a run.
Field blowup_weight(std::span<const double> phi, double alpha);

enum class FitStatus { Compliant, NonCompliant, Degenerate };

std::string to_string(FitStatus s);

/// Constants of y' >= C1 y^q - C2 fitted on a sampled series.
/// In the (y^q, y') plane the admissible lines lie below every sample; among those
/// touching two samples (the edges of the lower convex hull) C1 is the largest slope,
/// clamped at 0, and C2 >= 0 the matching intercept. y' is the backward difference,
/// paired with y at the end of its step.
struct BlowupFit {
    double C1 = 0.0;
    double C2 = 0.0;
    double margin = 0.0;     ///< min over samples of y' - C1 y^q + C2
    std::size_t samples = 0; ///< number of y' values used
    FitStatus status = FitStatus::Degenerate;
};

/// Requires at least 10 samples after differencing and strictly increasing t.
BlowupFit blowup_ode_fit(std::span<const double> t, std::span<const double> y, double q);

/// Amplitude bisection between a completing and a blowing-up member of
/// u0 = g + A * sine bump.
struct CriterionOptions {
    double a_lo = 0.0;
    double a_hi = 4.0;
    double rel_tol = 0.01;
    std::size_t max_iterations = 40;
};

struct CriterionProbe {
    double amplitude = 0.0;
    Verdict verdict = Verdict::Completed;
    std::optional<double> t_detect;
    double y0 = 0.0;
};

struct CriterionResult {
    double a_lo = 0.0;          ///< largest amplitude seen to complete
    double a_hi = 0.0;          ///< smallest amplitude seen to blow up
    double y0_threshold = 0.0;  ///< integral of u0 phi^alpha at a_hi
    double y0_lo = 0.0;
    std::optional<double> t_detect; ///< at a_hi
    std::vector<CriterionProbe> probes;
};

/// base supplies p, q, eps, mu and g; u0 is replaced per probe. Requires q > p > 2
/// and alpha in the admissible window. A StalledStep probe throws NumericalError
/// (inconclusive); so does a bracket whose ends do not straddle the threshold.
CriterionResult criterion_experiment(const GridPtr& grid, const ProblemSpec& base, double alpha,
                                     const StepControl& control, const CriterionOptions& options = {});

} // namespace gbulab
