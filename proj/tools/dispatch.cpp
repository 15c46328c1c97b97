#include "dispatch.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gbulab/analysis.hpp"
#include "gbulab/barriers.hpp"
#include "gbulab/errors.hpp"
#include "gbulab/field_io.hpp"
#include "gbulab/gbu_detect.hpp"
#include "gbulab/parallel.hpp"
#include "gbulab/report_json.hpp"
#include "gbulab/spectral.hpp"
#include "gbulab/timestepper.hpp"

namespace gbulab::cli {

namespace fs = std::filesystem;

namespace {

class Writer {
public:
    explicit Writer(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

    const fs::path& root() const { return root_; }

    void text(const fs::path& rel, const std::string& content) {
        const fs::path p = root_ / rel;
        fs::create_directories(p.parent_path());
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write " + p.string());
        f << content;
        if (!f) throw Error("write failed: " + p.string());
        files.push_back(p);
    }

    void bytes(const fs::path& rel, std::span<const std::uint8_t> content) {
        const fs::path p = root_ / rel;
        fs::create_directories(p.parent_path());
        write_bytes(p.string(), content);
        files.push_back(p);
    }

    std::vector<fs::path> files;

private:
    fs::path root_;
};

std::string short_num(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

fs::path input_path(const std::string& p, const fs::path& base) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

/// Nodal field as CSV (x[,y],value) for plotting.
std::string field_csv(const Grid& g, std::span<const double> v, const char* name) {
    std::ostringstream os;
    os.precision(17);
    os << (g.dimension() == 2 ? "x,y," : "x,") << name << '\n';
    for (std::size_t k = 0; k < g.size(); ++k) {
        os << g.x(g.ix(k)) << ',';
        if (g.dimension() == 2) os << g.y(g.jy(k)) << ',';
        os << v[k] << '\n';
    }
    return os.str();
}

ComplianceReport monotonicity_report(std::size_t samples, std::uint64_t seed) {
    const MonotonicitySuite s = monotonicity_suite(samples, seed);
    ComplianceReport r;
    r.name = "monotonicity";
    r.tolerance = 1e-12;
    r.worst_margin = s.worst_scaled_margin;
    r.pass = s.violations == 0 && s.sigma2_max_abs <= 1e-14;
    r.note("samples", static_cast<double>(s.samples));
    r.note("violations", static_cast<double>(s.violations));
    r.note("sigma2_max_abs", s.sigma2_max_abs);
    r.note("seed", static_cast<double>(seed));
    r.message = r.pass ? "no violations of the monotonicity inequality" : "monotonicity inequality violated";
    return r;
}

std::vector<std::string> effective_checks(const RunConfig& cfg) {
    if (!cfg.checks.empty() || cfg.kind != ExperimentKind::ComplianceSuite) return cfg.checks;
    if (!cfg.trajectory.empty()) return {"max_principle", "regularizing"};
    return {"max_principle", "comparison", "regularizing", "energy"};
}

bool has(const std::vector<std::string>& v, const char* name) { return std::find(v.begin(), v.end(), name) != v.end(); }

/// Checks that need the simulated trajectory or a separate experiment, in the requested order.
std::vector<ComplianceReport> run_checks(const RunConfig& cfg, const std::vector<std::string>& checks,
                                         const GridPtr& grid, const ProblemSpec& spec, const Trajectory& traj,
                                         const std::optional<ComplianceReport>& regularizing) {
    const double c = cfg.analysis.c.value_or(2.0);
    std::vector<ComplianceReport> out;
    for (const auto& name : checks) {
        if (name == "max_principle") {
            out.push_back(max_principle_check(traj, c));
        } else if (name == "regularizing") {
            out.push_back(regularizing ? *regularizing
                                       : regularizing_effect_check(traj, cfg.analysis.warmup.value_or(5),
                                                                   cfg.analysis.tol.value_or(0.1)));
        } else if (name == "energy") {
            out.push_back(energy_estimate(traj));
        } else if (name == "comparison") {
            ProblemSpec upper = spec;
            for (std::size_t k = 0; k < upper.u0.size(); ++k) upper.u0[k] = 2.0 * spec.u0[k] - spec.g[k];
            out.push_back(comparison_experiment(grid, spec, upper, cfg.control, c));
        } else if (name == "scaling") {
            out.push_back(scaling_transform_check(grid, spec, cfg.analysis.lambda.value_or(2.0), cfg.control));
        } else if (name == "monotonicity") {
            out.push_back(monotonicity_report(cfg.analysis.monotonicity_samples.value_or(10000), cfg.seed));
        }
        out.back().name = name;
    }
    return out;
}

bool write_checks(Writer& w, const std::vector<ComplianceReport>& reports, const std::string& suite) {
    bool pass = true;
    for (const auto& r : reports) {
        w.text(fs::path("compliance") / (r.name + ".json"), compliance_json(r));
        pass = pass && r.pass;
    }
    if (!reports.empty()) w.text("verdict.json", verdict_json(reports, suite));
    return pass;
}

RunOptions monitor_options(const RunConfig& cfg, const Grid& grid) {
    RunOptions opt;
    if (cfg.alpha) opt.y_weight = blowup_weight(principal_eigenpair(grid).phi, *cfg.alpha);
    return opt;
}

bool simulate(const RunConfig& cfg, Writer& w, const fs::path& base, const std::string& config_text) {
    const GridPtr grid = cfg.make_grid();
    const ProblemSpec spec = cfg.make_spec(*grid);
    const auto checks = effective_checks(cfg);

    if (!cfg.trajectory.empty()) {
        Trajectory traj{grid, spec, decode_trajectory(read_bytes(input_path(cfg.trajectory, base).string()), *grid), {}};
        if (traj.frames.empty()) throw FormatError("trajectory file holds no frames");
        return write_checks(w, run_checks(cfg, checks, grid, spec, traj, std::nullopt), to_string(cfg.kind));
    }

    RunOptions opt = monitor_options(cfg, *grid);
    std::optional<RegularizingMonitor> reg;
    if (has(checks, "regularizing")) {
        reg.emplace(*grid, spec, cfg.analysis.warmup.value_or(5), cfg.analysis.tol.value_or(0.1));
        opt.observer = [&reg](double t, double dt, const Field& a, const Field& b) { reg->observe(t, dt, a, b); };
    }
    RunResult res;
    if (!cfg.restart_from.empty()) {
        const SolutionState start = restore(read_bytes(input_path(cfg.restart_from, base).string()), grid, spec.g);
        res = run_from(start, spec, cfg.control, opt);
    } else {
        res = run(grid, spec, cfg.control, opt);
    }

    w.text("run_report.json", run_report_json(res.report, res.trajectory, config_text));
    w.text("monitors.csv", monitor_csv(res.trajectory));
    w.bytes("trajectory.bin", encode_trajectory(res.trajectory));
    const Frame& last = res.trajectory.last();
    w.bytes("snapshot.bin", snapshot(SolutionState(grid, last.u, last.t)));
    w.text("final_field.csv", field_csv(*grid, last.u, "u"));

    std::optional<ComplianceReport> streamed;
    if (reg) streamed = reg->report();
    return write_checks(w, run_checks(cfg, checks, grid, spec, res.trajectory, streamed), to_string(cfg.kind));
}

bool continue_eps(const RunConfig& cfg, Writer& w, std::size_t jobs) {
    const GridPtr grid = cfg.make_grid();
    const ProblemSpec spec = cfg.make_spec(*grid);
    const EpsContinuationReport r = epsilon_continuation(grid, spec, cfg.analysis.eps_list, cfg.control, jobs);
    w.text("eps_continuation.json", eps_continuation_json(r));
    for (std::size_t k = 0; k < r.eps.size(); ++k)
        w.text("final_field_" + std::to_string(k) + ".csv", field_csv(*grid, r.final_fields[k], "u"));
    w.text("extrapolated_field.csv", field_csv(*grid, r.extrapolated, "u"));
    return r.monotone;
}

bool detect(const RunConfig& cfg, Writer& w, std::size_t jobs, const std::string& config_text) {
    std::vector<std::size_t> resolutions = cfg.analysis.resolutions;
    if (resolutions.empty()) resolutions.push_back(cfg.grid.nx);
    const auto& thresholds = cfg.analysis.thresholds;

    struct Job {
        std::size_t n;
        double G;
        fs::path dir;
        GbuSample sample;
        std::string report, monitors, profile, shells, fit;
    };
    std::vector<Job> work;
    for (std::size_t n : resolutions)
        for (double G : thresholds)
            work.push_back({n, G, fs::path("runs") / ("n" + std::to_string(n) + "_G" + short_num(G)), {}, {}, {}, {}, {}, {}});

    // Each job owns its slot; files are written afterwards in a fixed order.
    parallel_for(work.size(), jobs, [&](std::size_t k) {
        Job& j = work[k];
        const GridPtr grid = cfg.make_grid(j.n);
        const ProblemSpec spec = cfg.make_spec(*grid);
        StepControl control = cfg.control;
        control.gbu_threshold = j.G;
        const RunResult res = run(grid, spec, control, monitor_options(cfg, *grid));
        j.sample = {j.n, j.G, res.report.verdict, res.report.t_detect};
        j.report = run_report_json(res.report, res.trajectory, config_text);
        j.monitors = monitor_csv(res.trajectory);
        if (res.report.verdict != Verdict::GBUDetected || !res.report.t_detect) return;

        // Boundary-layer profile over the last tenth of [0, T_detect], from a replay
        // that lands exactly on T (0.90 + 0.01 k).
        const double T = *res.report.t_detect;
        const double C2 = max_gradient(*grid, spec.u0);
        RunOptions replay_opt;
        for (int k = 0; k < 10; ++k) replay_opt.output_times.push_back(T * (0.90 + 0.01 * k));
        const RunResult replay = run(grid, spec, control, replay_opt);
        std::vector<Frame> decade;
        for (const Frame& f : replay.trajectory.frames)
            if (std::find(replay_opt.output_times.begin(), replay_opt.output_times.end(), f.t) !=
                replay_opt.output_times.end())
                decade.push_back(f);
        if (!decade.empty()) {
            const ProfileCheck pc = gradient_profile_check(*grid, decade, spec.p, spec.q, C2);
            j.profile = profile_json(pc);
            j.shells = shell_csv(shell_profile(*grid, decade.back().u, profile_exponent(spec.p, spec.q), pc.C1, C2));
        }

        if (!cfg.alpha) return;
        std::vector<double> ts, ys;
        for (const MonitorSample& m : res.trajectory.monitors)
            if (m.t >= 0.5 * T) {
                ts.push_back(m.t);
                ys.push_back(m.y);
            }
        if (ts.size() > 10) j.fit = blowup_fit_json(blowup_ode_fit(ts, ys, spec.q));
    });

    std::vector<GbuSample> samples;
    for (const Job& j : work) {
        w.text(j.dir / "run_report.json", j.report);
        w.text(j.dir / "monitors.csv", j.monitors);
        if (!j.profile.empty()) w.text(j.dir / "gradient_profile.json", j.profile);
        if (!j.shells.empty()) w.text(j.dir / "shell_profile.csv", j.shells);
        if (!j.fit.empty()) w.text(j.dir / "blowup_fit.json", j.fit);
        samples.push_back(j.sample);
    }
    w.text("gbu_verdict.json", gbu_json(detect_gbu(samples)));
    return true;
}

bool certify(const RunConfig& cfg, Writer& w) {
    BarrierData d;
    d.p = cfg.problem.p;
    d.q = cfg.problem.q;
    d.N = cfg.analysis.N.value_or(cfg.grid.dimension);
    d.rho = cfg.analysis.rho.value_or(0.5);
    d.g_sup = cfg.problem.boundary_value;
    d.g_min = cfg.problem.boundary_value;
    d.u0_sup = cfg.problem.boundary_value + cfg.problem.amplitude;
    std::vector<double> eps = cfg.analysis.eps_list;
    if (eps.empty()) eps.push_back(cfg.problem.eps);
    const BarrierCertificate cert =
        certify_barrier(d, eps, cfg.analysis.points.value_or(10000), cfg.analysis.s_max.value_or(1.0));
    w.text("barrier_certificate.json", barrier_json(cert));
    return cert.certified;
}

bool bisect(const RunConfig& cfg, Writer& w) {
    const GridPtr grid = cfg.make_grid();
    const ProblemSpec spec = cfg.make_spec(*grid);
    const double alpha = cfg.alpha.value_or(alpha_window(spec.p, spec.q).midpoint());
    CriterionOptions opt;
    opt.a_lo = cfg.analysis.a_lo.value_or(opt.a_lo);
    opt.a_hi = cfg.analysis.a_hi.value_or(opt.a_hi);
    opt.rel_tol = cfg.analysis.rel_tol.value_or(opt.rel_tol);
    w.text("criterion.json", criterion_json(criterion_experiment(grid, spec, alpha, cfg.control, opt), alpha));
    return true;
}

bool eig(const RunConfig& cfg, Writer& w) {
    const GridPtr grid = cfg.make_grid();
    const EigenData e = principal_eigenpair(*grid, cfg.analysis.tol.value_or(1e-10));
    w.text("eigen.json", eigen_json(e, *grid));
    w.text("eigenfunction.csv", field_csv(*grid, e.phi, "phi"));
    return true;
}

std::string error_json(int code, const std::string& category, const std::string& message) {
    nlohmann::json j = {{"kind", "error"}, {"exit_code", code}, {"category", category}, {"message", message}};
    return j.dump(2) + "\n";
}

} // namespace

fs::path resolve_output(const std::optional<std::string>& flag, const std::string& configured, const char* env) {
    if (flag && !flag->empty()) return *flag;
    if (!configured.empty()) return configured;
    if (env && *env) return env;
    return ".";
}

DispatchResult dispatch(const RunConfig& cfg, const fs::path& out, std::size_t jobs, const fs::path& base) {
    Writer w(out);
    const std::string text = canonical_text(cfg);
    w.text("config.ini", text);
    bool pass = true;
    switch (cfg.kind) {
    case ExperimentKind::Simulate:
    case ExperimentKind::ComplianceSuite: pass = simulate(cfg, w, base, text); break;
    case ExperimentKind::EpsilonContinuation: pass = continue_eps(cfg, w, jobs); break;
    case ExperimentKind::GbuDetect: pass = detect(cfg, w, jobs, text); break;
    case ExperimentKind::BarrierCertify: pass = certify(cfg, w); break;
    case ExperimentKind::CriterionBisect: pass = bisect(cfg, w); break;
    case ExperimentKind::Eigen: pass = eig(cfg, w); break;
    }
    return {pass, std::move(w.files)};
}

int run_command(const Invocation& inv, std::ostream& log) {
    const char* env = std::getenv("GBULAB_OUT");
    fs::path out = resolve_output(inv.out, "", env);
    auto fail = [&](int code, const std::string& category, const std::string& message) {
        log << "gbulab " << inv.verb << ": " << category << " error: " << message << '\n';
        try {
            Writer(out).text("error.json", error_json(code, category, message));
        } catch (const std::exception& e) {
            log << "gbulab: could not write error.json: " << e.what() << '\n';
        }
        return code;
    };

    RunConfig cfg;
    try {
        cfg = load_config(inv.config_path);
        const auto verb_kind = kind_from_verb(inv.verb);
        if (!verb_kind) throw ConfigError("unknown verb '" + inv.verb + "'");
        if (*verb_kind != cfg.kind)
            throw ConfigError("verb '" + inv.verb + "' runs kind = " + to_string(*verb_kind) + ", config has kind = " +
                              to_string(cfg.kind));
        if (inv.seed) cfg.seed = *inv.seed;
        if (inv.jobs < 1) throw ConfigError("--jobs must be >= 1");
        validate(cfg);
        out = resolve_output(inv.out, cfg.output, env);
    } catch (const std::exception& e) {
        return fail(kConfigError, "config", e.what());
    }

    try {
        const fs::path base = fs::path(inv.config_path).parent_path();
        const DispatchResult r = dispatch(cfg, out, inv.jobs, base.empty() ? fs::path(".") : base);
        log << "gbulab " << inv.verb << ": " << (r.pass ? "pass" : "check failure") << ", " << r.artifacts.size()
            << " files in " << out.string() << '\n';
        return r.pass ? kPass : kCheckFailure;
    } catch (const std::exception& e) {
        return fail(kRuntimeFailure, "runtime", e.what());
    }
}

} // namespace gbulab::cli
