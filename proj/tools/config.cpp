#include "config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "gbulab/errors.hpp"
#include "gbulab/spectral.hpp"

namespace gbulab::cli {

namespace {

struct KindName {
    ExperimentKind kind;
    const char* name;
    const char* verb;
};

constexpr std::array<KindName, 7> kKinds{{
    {ExperimentKind::Simulate, "simulate", "simulate"},
    {ExperimentKind::EpsilonContinuation, "epsilon_continuation", "continue-eps"},
    {ExperimentKind::GbuDetect, "gbu_detect", "detect-gbu"},
    {ExperimentKind::BarrierCertify, "barrier_certify", "certify-barrier"},
    {ExperimentKind::CriterionBisect, "criterion_bisect", "bisect-criterion"},
    {ExperimentKind::ComplianceSuite, "compliance_suite", "check"},
    {ExperimentKind::Eigen, "eigen", "eig"},
}};

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

using Key = std::pair<std::string, std::string>;

/// Drops trailing `# ...` / `; ...` comments (preceded by whitespace, outside quotes).
std::string strip_inline_comments(const std::string& text) {
    std::istringstream in(text);
    std::string out, line;
    while (std::getline(in, line)) {
        bool quoted = false;
        for (std::size_t k = 0; k < line.size(); ++k) {
            if (line[k] == '"') quoted = !quoted;
            if (!quoted && k > 0 && (line[k] == '#' || line[k] == ';') && std::isspace(static_cast<unsigned char>(line[k - 1]))) {
                line.erase(k);
                break;
            }
        }
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        out += line + '\n';
    }
    return out;
}

/// Raw values by (section, key); consumed entries are erased so leftovers are unknown keys.
class Entries {
public:
    explicit Entries(const std::string& text) {
        std::istringstream in(strip_inline_comments(text));
        std::vector<CLI::ConfigItem> items;
        try {
            items = CLI::ConfigINI().from_config(in);
        } catch (const std::exception& e) {
            fail(std::string("malformed config: ") + e.what());
        }
        for (const auto& it : items) {
            if (it.name == "++" || it.name == "--") continue;
            if (it.parents.size() != 1) fail("key '" + it.name + "' must appear inside exactly one [section]");
            Key key{it.parents.front(), it.name};
            if (!values_.emplace(key, it.inputs).second) fail("duplicate key [" + key.first + "] " + key.second);
        }
    }

    std::optional<std::vector<std::string>> take(const std::string& section, const std::string& key) {
        auto it = values_.find({section, key});
        if (it == values_.end()) return std::nullopt;
        auto v = std::move(it->second);
        values_.erase(it);
        return v;
    }

    void reject_leftovers() const {
        if (values_.empty()) return;
        const auto& [s, k] = values_.begin()->first;
        fail("unknown key [" + s + "] " + k);
    }

private:
    std::map<Key, std::vector<std::string>> values_;
};

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

std::string scalar(const std::vector<std::string>& v, const std::string& section, const std::string& key) {
    if (v.size() > 1) fail(where(section, key) + ": expected a single value (key repeated or given a list)");
    return v.empty() ? std::string() : v.front();
}

double to_double(const std::string& s, const std::string& what) {
    double out = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(out))
        fail(what + ": expected a finite number, got '" + s + "'");
    return out;
}

template <typename U>
U to_unsigned(const std::string& s, const std::string& what) {
    U out = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    if (s.empty() || ec != std::errc() || ptr != end) fail(what + ": expected a nonnegative integer, got '" + s + "'");
    return out;
}

std::string fmt(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string quoted(const std::string& s) {
    if (s.find_first_of(" ,;#=\"'[]\t") == std::string::npos && !s.empty()) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') fail("string values may not contain double quotes");
        out += ch;
    }
    return out + "\"";
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F&& f) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + f(v[k]);
    return out;
}

/// Analysis keys each kind accepts.
const std::set<std::string>& analysis_keys(ExperimentKind k) {
    static const std::set<std::string> checks{"c", "warmup", "tol", "lambda", "monotonicity_samples"};
    static const std::set<std::string> eps{"eps_list"};
    static const std::set<std::string> gbu{"thresholds", "resolutions"};
    static const std::set<std::string> barrier{"rho", "N", "points", "s_max", "eps_list"};
    static const std::set<std::string> bisect{"a_lo", "a_hi", "rel_tol"};
    static const std::set<std::string> eig{"tol"};
    switch (k) {
    case ExperimentKind::Simulate:
    case ExperimentKind::ComplianceSuite: return checks;
    case ExperimentKind::EpsilonContinuation: return eps;
    case ExperimentKind::GbuDetect: return gbu;
    case ExperimentKind::BarrierCertify: return barrier;
    case ExperimentKind::CriterionBisect: return bisect;
    case ExperimentKind::Eigen: return eig;
    }
    return eig;
}

const std::set<std::string> kTrajectoryChecks{"max_principle", "regularizing"};

} // namespace

std::string to_string(ExperimentKind k) {
    for (const auto& e : kKinds)
        if (e.kind == k) return e.name;
    return "?";
}

std::optional<ExperimentKind> kind_from_string(const std::string& s) {
    for (const auto& e : kKinds)
        if (s == e.name) return e.kind;
    return std::nullopt;
}

std::string verb_of(ExperimentKind k) {
    for (const auto& e : kKinds)
        if (e.kind == k) return e.verb;
    return "?";
}

std::optional<ExperimentKind> kind_from_verb(const std::string& verb) {
    for (const auto& e : kKinds)
        if (verb == e.verb) return e.kind;
    return std::nullopt;
}

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names{"max_principle", "comparison", "regularizing",
                                                "energy",        "scaling",    "monotonicity"};
    return names;
}

GridPtr RunConfig::make_grid() const { return make_grid(grid.nx); }

GridPtr RunConfig::make_grid(std::size_t n) const {
    if (grid.dimension == 1) return make_shared_grid(Grid::interval({grid.x_lo, grid.x_hi}, n));
    // Refinement keeps the aspect of the configured grid.
    const std::size_t m = n == grid.nx ? grid.ny : std::max<std::size_t>(3, (grid.ny - 1) * (n - 1) / (grid.nx - 1) + 1);
    return make_shared_grid(Grid::rectangle({grid.x_lo, grid.x_hi}, {grid.y_lo, grid.y_hi}, n, m));
}

ProblemSpec RunConfig::make_spec(const Grid& g) const {
    Field gv(g.size(), problem.boundary_value);
    Field u0 = sine_bump(g, problem.amplitude);
    for (double& v : u0) v += problem.boundary_value;
    return ProblemSpec::make(g, problem.p, problem.q, problem.eps, problem.mu, std::move(gv), std::move(u0));
}

void validate(const RunConfig& c) {
    const auto& g = c.grid;
    if (g.dimension != 1 && g.dimension != 2) fail("[grid] dimension must be 1 or 2");
    if (g.nx < 3) fail("[grid] nx must be >= 3");
    if (g.dimension == 2 && g.ny < 3) fail("[grid] ny must be >= 3 in 2D");
    if (g.dimension == 1 && g.ny != 1) fail("[grid] ny is only valid in 2D");
    if (!(g.x_lo < g.x_hi)) fail("[grid] requires x_lo < x_hi");
    if (g.dimension == 2 && !(g.y_lo < g.y_hi)) fail("[grid] requires y_lo < y_hi");

    const auto& p = c.problem;
    try {
        validate_exponents(p.p, p.q);
    } catch (const PreconditionError& e) {
        fail(std::string("[problem] ") + e.what());
    }
    if (p.eps < 0.0) fail("[problem] requires eps >= 0");
    if (p.mu < 0.0) fail("[problem] requires mu >= 0");
    if (p.amplitude < 0.0) fail("[problem] requires amplitude >= 0 (nonnegative initial data)");
    if (p.boundary_value < 0.0) fail("[problem] requires boundary_value >= 0 (nonnegative boundary data)");

    try {
        c.control.validate();
    } catch (const PreconditionError& e) {
        fail(std::string("[control] ") + e.what());
    }

    const auto& a = c.analysis;
    const bool sim = c.kind == ExperimentKind::Simulate;
    const bool suite = c.kind == ExperimentKind::ComplianceSuite;
    if (!c.restart_from.empty() && !sim) fail("[experiment] restart_from is only valid for kind = simulate");
    if (!c.trajectory.empty() && !suite) fail("[experiment] trajectory is only valid for kind = compliance_suite");
    if (!c.checks.empty() && !sim && !suite) fail("[experiment] checks is only valid for simulate and compliance_suite");
    if (c.alpha && !(sim || c.kind == ExperimentKind::GbuDetect || c.kind == ExperimentKind::CriterionBisect))
        fail("[experiment] alpha is only valid for simulate, gbu_detect and criterion_bisect");
    if (c.alpha && !(*c.alpha > 0.0)) fail("[experiment] requires alpha > 0");
    for (const auto& name : c.checks) {
        if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end())
            fail("[experiment] unknown check '" + name + "'");
        if (!c.trajectory.empty() && !kTrajectoryChecks.count(name))
            fail("[experiment] check '" + name + "' needs a simulation and cannot run on a trajectory file");
    }

    auto positive = [](const std::optional<double>& v, const char* name) {
        if (v && !(*v > 0.0)) fail(std::string("[analysis] requires ") + name + " > 0");
    };
    positive(a.c, "c");
    positive(a.tol, "tol");
    positive(a.lambda, "lambda");
    positive(a.rho, "rho");
    positive(a.s_max, "s_max");
    positive(a.rel_tol, "rel_tol");
    if (a.N && *a.N < 1) fail("[analysis] requires N >= 1");
    if (a.points && *a.points < 2) fail("[analysis] requires points >= 2");
    if (a.monotonicity_samples && *a.monotonicity_samples < 1) fail("[analysis] requires monotonicity_samples >= 1");
    for (double e : a.eps_list)
        if (e < 0.0) fail("[analysis] eps_list entries must be >= 0");

    switch (c.kind) {
    case ExperimentKind::EpsilonContinuation:
        if (a.eps_list.size() < 3) fail("[analysis] eps_list needs at least 3 values for epsilon_continuation");
        for (std::size_t k = 1; k < a.eps_list.size(); ++k)
            if (!(a.eps_list[k] < a.eps_list[k - 1])) fail("[analysis] eps_list must be strictly decreasing");
        break;
    case ExperimentKind::GbuDetect: {
        if (a.thresholds.empty()) fail("[analysis] thresholds is required for gbu_detect");
        for (std::size_t k = 0; k < a.thresholds.size(); ++k) {
            if (!(a.thresholds[k] > 0.0)) fail("[analysis] thresholds must be > 0");
            if (k && !(a.thresholds[k] > a.thresholds[k - 1])) fail("[analysis] thresholds must be increasing");
        }
        for (std::size_t n : a.resolutions)
            if (n < 3) fail("[analysis] resolutions must be >= 3");
        const std::size_t grids = a.resolutions.empty() ? 1 : a.resolutions.size();
        if (grids * a.thresholds.size() < 2) fail("[analysis] gbu_detect needs at least two (threshold, resolution) runs");
        break;
    }
    case ExperimentKind::CriterionBisect: {
        if (!(p.p > 2.0 && p.q > p.p))
            fail("[problem] criterion_bisect requires q > p > 2 (hypothesis of the blow-up criterion)");
        const AlphaWindow w = alpha_window(p.p, p.q);
        if (c.alpha && !w.contains(*c.alpha))
            fail("[experiment] alpha = " + fmt(*c.alpha) + " lies outside the admissible window (" + fmt(w.lo) + ", " +
                 fmt(w.hi) + ")");
        if (a.a_lo && *a.a_lo < 0.0) fail("[analysis] requires a_lo >= 0");
        if (a.a_lo.value_or(0.0) >= a.a_hi.value_or(4.0)) fail("[analysis] requires a_lo < a_hi");
        break;
    }
    case ExperimentKind::BarrierCertify:
        if (!(p.q > p.p - 1.0 && p.p - 1.0 > 1.0)) fail("[problem] barrier_certify requires q > p-1 > 1");
        break;
    default:
        break;
    }
}

RunConfig parse_config(const std::string& text) {
    Entries e(text);
    RunConfig c;

    auto str = [&](const char* s, const char* k) -> std::optional<std::string> {
        auto v = e.take(s, k);
        if (!v) return std::nullopt;
        return scalar(*v, s, k);
    };
    auto dbl = [&](const char* s, const char* k) -> std::optional<double> {
        auto v = str(s, k);
        if (!v) return std::nullopt;
        return to_double(*v, where(s, k));
    };
    auto size = [&](const char* s, const char* k) -> std::optional<std::size_t> {
        auto v = str(s, k);
        if (!v) return std::nullopt;
        return to_unsigned<std::size_t>(*v, where(s, k));
    };
    auto need = [](auto v, const char* s, const char* k) {
        if (!v) fail("missing required key " + where(s, k));
        return *v;
    };

    // [experiment]
    const std::string kind = need(str("experiment", "kind"), "experiment", "kind");
    auto kk = kind_from_string(kind);
    if (!kk) fail("[experiment] unknown kind '" + kind + "'");
    c.kind = *kk;
    c.output = str("experiment", "output").value_or("");
    if (auto s = str("experiment", "seed")) c.seed = to_unsigned<std::uint64_t>(*s, "[experiment] seed");
    c.alpha = dbl("experiment", "alpha");
    c.restart_from = str("experiment", "restart_from").value_or("");
    c.trajectory = str("experiment", "trajectory").value_or("");
    if (auto v = e.take("experiment", "checks")) c.checks = *v;

    // [grid]
    if (auto v = size("grid", "dimension")) {
        if (*v != 1 && *v != 2) fail("[grid] dimension must be 1 or 2");
        c.grid.dimension = static_cast<int>(*v);
    }
    c.grid.nx = need(size("grid", "nx"), "grid", "nx");
    if (c.grid.dimension == 2) c.grid.ny = need(size("grid", "ny"), "grid", "ny");
    else if (auto v = size("grid", "ny")) c.grid.ny = *v;
    c.grid.x_lo = dbl("grid", "x_lo").value_or(0.0);
    c.grid.x_hi = dbl("grid", "x_hi").value_or(1.0);
    if (c.grid.dimension == 2) {
        c.grid.y_lo = dbl("grid", "y_lo").value_or(0.0);
        c.grid.y_hi = dbl("grid", "y_hi").value_or(1.0);
    }

    // [problem]
    c.problem.p = need(dbl("problem", "p"), "problem", "p");
    c.problem.q = need(dbl("problem", "q"), "problem", "q");
    c.problem.eps = dbl("problem", "eps").value_or(0.0);
    c.problem.mu = dbl("problem", "mu").value_or(1.0);
    c.problem.amplitude = dbl("problem", "amplitude").value_or(1.0);
    c.problem.boundary_value = dbl("problem", "boundary_value").value_or(0.0);

    // [control]
    StepControl& sc = c.control;
    sc.t_end = need(dbl("control", "t_end"), "control", "t_end");
    sc.theta = dbl("control", "theta").value_or(sc.theta);
    sc.dt_min = dbl("control", "dt_min").value_or(sc.dt_min);
    sc.gbu_threshold = dbl("control", "gbu_threshold").value_or(sc.gbu_threshold);
    sc.snapshot_every = size("control", "snapshot_every").value_or(sc.snapshot_every);
    sc.monitor_every = size("control", "monitor_every").value_or(sc.monitor_every);
    sc.max_steps = size("control", "max_steps").value_or(sc.max_steps);

    // [analysis], restricted to the keys the kind uses
    const auto& allowed = analysis_keys(c.kind);
    auto take = [&](const char* k) -> std::optional<std::vector<std::string>> {
        auto v = e.take("analysis", k);
        if (v && !allowed.count(k)) fail(where("analysis", k) + " is not used by kind = " + kind);
        return v;
    };
    auto adbl = [&](const char* k) -> std::optional<double> {
        auto v = take(k);
        if (!v) return std::nullopt;
        return to_double(scalar(*v, "analysis", k), where("analysis", k));
    };
    auto asize = [&](const char* k) -> std::optional<std::size_t> {
        auto v = take(k);
        if (!v) return std::nullopt;
        return to_unsigned<std::size_t>(scalar(*v, "analysis", k), where("analysis", k));
    };
    auto dlist = [&](const char* k) {
        std::vector<double> out;
        if (auto v = take(k))
            for (const auto& s : *v) out.push_back(to_double(s, where("analysis", k)));
        return out;
    };
    AnalysisConfig& a = c.analysis;
    a.eps_list = dlist("eps_list");
    a.thresholds = dlist("thresholds");
    if (auto v = take("resolutions"))
        for (const auto& s : *v) a.resolutions.push_back(to_unsigned<std::size_t>(s, "[analysis] resolutions"));
    a.a_lo = adbl("a_lo");
    a.a_hi = adbl("a_hi");
    a.rel_tol = adbl("rel_tol");
    a.rho = adbl("rho");
    if (auto v = asize("N")) a.N = static_cast<int>(*v);
    a.points = asize("points");
    a.s_max = adbl("s_max");
    a.c = adbl("c");
    a.warmup = asize("warmup");
    a.tol = adbl("tol");
    a.lambda = adbl("lambda");
    a.monotonicity_samples = asize("monotonicity_samples");

    e.reject_leftovers();
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot read config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

std::string canonical_text(const RunConfig& c) {
    std::ostringstream os;
    auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
    auto num = [&](const char* k, double v) { kv(k, fmt(v)); };
    auto cnt = [&](const char* k, std::size_t v) { kv(k, std::to_string(v)); };

    os << "[experiment]\n";
    kv("kind", to_string(c.kind));
    if (!c.output.empty()) kv("output", quoted(c.output));
    kv("seed", std::to_string(c.seed));
    if (c.alpha) num("alpha", *c.alpha);
    if (!c.restart_from.empty()) kv("restart_from", quoted(c.restart_from));
    if (!c.trajectory.empty()) kv("trajectory", quoted(c.trajectory));
    if (!c.checks.empty()) kv("checks", join(c.checks, [](const std::string& s) { return s; }));

    os << "\n[grid]\n";
    cnt("dimension", static_cast<std::size_t>(c.grid.dimension));
    cnt("nx", c.grid.nx);
    if (c.grid.dimension == 2) cnt("ny", c.grid.ny);
    num("x_lo", c.grid.x_lo);
    num("x_hi", c.grid.x_hi);
    if (c.grid.dimension == 2) {
        num("y_lo", c.grid.y_lo);
        num("y_hi", c.grid.y_hi);
    }

    os << "\n[problem]\n";
    num("p", c.problem.p);
    num("q", c.problem.q);
    num("eps", c.problem.eps);
    num("mu", c.problem.mu);
    num("amplitude", c.problem.amplitude);
    num("boundary_value", c.problem.boundary_value);

    os << "\n[control]\n";
    num("t_end", c.control.t_end);
    num("theta", c.control.theta);
    num("dt_min", c.control.dt_min);
    num("gbu_threshold", c.control.gbu_threshold);
    cnt("snapshot_every", c.control.snapshot_every);
    cnt("monitor_every", c.control.monitor_every);
    cnt("max_steps", c.control.max_steps);

    std::ostringstream an;
    auto akv = [&](const char* k, const std::string& v) { an << k << " = " << v << '\n'; };
    auto onum = [&](const char* k, const std::optional<double>& v) {
        if (v) akv(k, fmt(*v));
    };
    auto ocnt = [&](const char* k, const auto& v) {
        if (v) akv(k, std::to_string(*v));
    };
    const auto& a = c.analysis;
    if (!a.eps_list.empty()) akv("eps_list", join(a.eps_list, fmt));
    if (!a.thresholds.empty()) akv("thresholds", join(a.thresholds, fmt));
    if (!a.resolutions.empty())
        akv("resolutions", join(a.resolutions, [](std::size_t n) { return std::to_string(n); }));
    onum("a_lo", a.a_lo);
    onum("a_hi", a.a_hi);
    onum("rel_tol", a.rel_tol);
    onum("rho", a.rho);
    ocnt("N", a.N);
    ocnt("points", a.points);
    onum("s_max", a.s_max);
    onum("c", a.c);
    ocnt("warmup", a.warmup);
    onum("tol", a.tol);
    onum("lambda", a.lambda);
    ocnt("monotonicity_samples", a.monotonicity_samples);
    if (!an.str().empty()) os << "\n[analysis]\n" << an.str();
    return os.str();
}

} // namespace gbulab::cli
