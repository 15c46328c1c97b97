#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbulab/timestepper.hpp"

namespace gbulab {

/// Outcome of one run entering the blow-up assessment.
struct GbuSample {
    std::size_t resolution = 0; ///< points per axis of the run's grid
    double threshold = 0.0;     ///< G used for this sample
    Verdict verdict = Verdict::Completed;
    std::optional<double> t_detect;
};

enum class GbuVerdict { GBU, NoGBU, Inconclusive };

std::string to_string(GbuVerdict v);

struct GbuDetectOptions {
    /// Increments must contract at least by this ratio: d2 <= contraction * d1.
    double contraction = 0.9;
    /// Relative tolerance for agreement of the extrapolated T_max across resolutions.
    double agreement = 0.1;
};

/// Per-resolution Cauchy test on T_detect(G) < T_detect(2G) < T_detect(4G).
struct GbuLevel {
    std::size_t resolution = 0;
    std::vector<double> thresholds;
    std::vector<double> t_detect;
    double ratio = 0.0;       ///< d2 / d1, 0 when both increments vanish
    double t_max = 0.0;       ///< geometric extrapolation T3 + d2 r / (1 - r)
    bool cauchy = false;
};

struct GbuAssessment {
    GbuVerdict verdict = GbuVerdict::Inconclusive;
    std::optional<double> t_max;     ///< estimate from the finest resolution
    double spread = 0.0;             ///< (max - min) / min of every T_detect entering the test
    std::vector<GbuLevel> levels;
    std::string reason;
};

/// Classifies a family of runs (thresholds G, 2G, 4G on one or more grids).
/// Requires at least two samples.
GbuAssessment detect_gbu(std::span<const GbuSample> samples, const GbuDetectOptions& options = {});

/// Result of solving the same problem for a decreasing sequence of eps.
struct EpsContinuationReport {
    std::vector<double> eps;
    std::vector<Field> final_fields;
    std::vector<double> final_times;
    std::vector<double> distances;   ///< sup |u_k - u_{k+1}| for consecutive eps values
    bool monotone = false;           ///< distances strictly decreasing
    std::optional<double> rate;      ///< last distance ratio when below 1
    Field extrapolated;              ///< geometric extrapolation to eps = 0 (last field when no rate)
};

/// Runs spec for every eps (in parallel over `jobs` workers) and compares final fields.
/// eps_list must be strictly decreasing, nonnegative, with at least 3 entries.
/// Any run that does not complete throws NumericalError.
EpsContinuationReport epsilon_continuation(const GridPtr& grid, const ProblemSpec& spec, std::span<const double> eps_list,
                                           const StepControl& control, std::size_t jobs = 1);

} // namespace gbulab
