#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gbulab/grid.hpp"
#include "gbulab/problem.hpp"
#include "gbulab/timestepper.hpp"

namespace gbulab::cli {

enum class ExperimentKind { Simulate, EpsilonContinuation, GbuDetect, BarrierCertify, CriterionBisect, ComplianceSuite, Eigen };

std::string to_string(ExperimentKind k);
std::optional<ExperimentKind> kind_from_string(const std::string& s);
/// Command-line verb that runs a kind (simulate, continue-eps, ...).
std::string verb_of(ExperimentKind k);
std::optional<ExperimentKind> kind_from_verb(const std::string& verb);

struct GridConfig {
    int dimension = 1;
    std::size_t nx = 0;
    std::size_t ny = 1;
    double x_lo = 0.0;
    double x_hi = 1.0;
    double y_lo = 0.0;
    double y_hi = 1.0;
};

/// u0 = boundary_value + amplitude * sine bump, g = boundary_value.
struct ProblemConfig {
    double p = 0.0;
    double q = 0.0;
    double eps = 0.0;
    double mu = 1.0;
    double amplitude = 1.0;
    double boundary_value = 0.0;
};

/// Kind-specific knobs; unset entries take the documented defaults at dispatch.
struct AnalysisConfig {
    std::vector<double> eps_list;
    std::vector<double> thresholds;
    std::vector<std::size_t> resolutions;
    std::optional<double> a_lo, a_hi, rel_tol;
    std::optional<double> rho;
    std::optional<int> N;
    std::optional<std::size_t> points;
    std::optional<double> s_max;
    std::optional<double> c;
    std::optional<std::size_t> warmup;
    std::optional<double> tol;
    std::optional<double> lambda;
    std::optional<std::size_t> monotonicity_samples;
};

struct RunConfig {
    ExperimentKind kind = ExperimentKind::Simulate;
    std::string output;
    std::uint64_t seed = 0;
    std::optional<double> alpha;
    std::string restart_from;
    std::string trajectory;
    std::vector<std::string> checks;
    GridConfig grid;
    ProblemConfig problem;
    StepControl control;
    AnalysisConfig analysis;

    GridPtr make_grid() const;
    /// Grid of the same box with n points per axis.
    GridPtr make_grid(std::size_t n) const;
    ProblemSpec make_spec(const Grid& grid) const;
};

/// Names accepted in [experiment] checks.
const std::vector<std::string>& known_checks();

/// Parses and validates the key = value text. Unknown sections or keys, duplicates,
/// missing required keys and hypothesis violations throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Re-checks every constraint (used after command-line overrides).
void validate(const RunConfig& cfg);

/// Deterministic text form: fixed section/key order, shortest round-trip numbers.
/// parse_config(canonical_text(c)) reproduces c.
std::string canonical_text(const RunConfig& cfg);

} // namespace gbulab::cli
