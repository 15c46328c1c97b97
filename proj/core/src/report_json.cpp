#include "gbulab/report_json.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace gbulab {

namespace {

using nlohmann::json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T>
json opt(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (std::is_floating_point_v<T>)
        return num(*v);
    else
        return *v;
}

json nums(std::span<const double> v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json grid_obj(const Grid& g) {
    json ext = json::array();
    json pts = json::array();
    for (int a = 0; a < g.dimension(); ++a) {
        ext.push_back({g.extent(a).lo, g.extent(a).hi});
        pts.push_back(g.points(a));
    }
    return {{"dimension", g.dimension()}, {"extents", ext}, {"points", pts}};
}

json compliance_obj(const ComplianceReport& r) {
    json details = json::object();
    for (const auto& [k, v] : r.details) details[k] = num(v);
    return {{"name", r.name},       {"pass", r.pass},          {"worst_margin", num(r.worst_margin)},
            {"node", opt(r.node)},  {"time", opt(r.time)},     {"tolerance", num(r.tolerance)},
            {"details", details},   {"message", r.message}};
}

json residual_obj(const ResidualReport& r) {
    return {{"min_residual", num(r.min_residual)},
            {"s_at_min", num(r.s_at_min)},
            {"kappa_at_min", num(r.kappa_at_min)},
            {"min_diffusion", num(r.min_diffusion)},
            {"points", r.points}};
}

} // namespace

std::string grid_json(const Grid& grid) { return dump(grid_obj(grid)); }

std::string run_report_json(const RunReport& report, const Trajectory& traj, const std::string& config_text) {
    json crossings = json::array();
    for (const auto& c : report.crossings) crossings.push_back({{"threshold", num(c.threshold)}, {"t", num(c.t)}});
    std::vector<double> t, umax, umin, uinf, grad, y, ut2;
    for (const auto& m : traj.monitors) {
        t.push_back(m.t);
        umax.push_back(m.max_u);
        umin.push_back(m.min_u);
        uinf.push_back(std::max(std::abs(m.max_u), std::abs(m.min_u)));
        grad.push_back(m.grad_inf);
        y.push_back(m.y);
        ut2.push_back(m.ut_l2_acc);
    }
    json j = {
        {"kind", "run_report"},
        {"verdict", to_string(report.verdict)},
        {"t_detect", opt(report.t_detect)},
        {"crossings", crossings},
        {"steps", report.steps},
        {"final_time", num(report.final_time)},
        {"smallest_dt", num(report.smallest_dt)},
        {"largest_dt", num(report.largest_dt)},
        {"wall_seconds", num(report.wall_seconds)},
        {"message", report.message},
        {"grid", traj.grid ? grid_obj(*traj.grid) : json(nullptr)},
        {"spec", {{"p", traj.spec.p}, {"q", traj.spec.q}, {"eps", traj.spec.eps}, {"mu", traj.spec.mu}}},
        {"config", config_text},
        {"series",
         {{"t", nums(t)},
          {"u_inf", nums(uinf)},
          {"grad_inf", nums(grad)},
          {"min_u", nums(umin)},
          {"max_u", nums(umax)},
          {"y", nums(y)},
          {"ut_l2_acc", nums(ut2)}}},
    };
    return dump(j);
}

std::string monitor_csv(const Trajectory& traj) {
    std::ostringstream os;
    os.precision(17);
    os << "t,max_u,min_u,grad_inf,y,ut_l2_acc\n";
    for (const auto& m : traj.monitors)
        os << m.t << ',' << m.max_u << ',' << m.min_u << ',' << m.grad_inf << ',' << m.y << ',' << m.ut_l2_acc << '\n';
    return os.str();
}

std::string compliance_json(const ComplianceReport& report) { return dump(compliance_obj(report)); }

std::string verdict_json(std::span<const ComplianceReport> reports, const std::string& suite) {
    json checks = json::array();
    bool pass = true;
    for (const auto& r : reports) {
        checks.push_back(compliance_obj(r));
        pass = pass && r.pass;
    }
    return dump({{"kind", "verdict"}, {"suite", suite}, {"pass", pass}, {"checks", checks}});
}

std::string shell_csv(std::span<const ShellRow> rows) {
    std::ostringstream os;
    os.precision(17);
    os << "delta_shell,max_grad,bound_value\n";
    for (const auto& r : rows) os << r.delta << ',' << r.max_grad << ',' << r.bound_value << '\n';
    return os.str();
}

std::string barrier_json(const BarrierCertificate& cert) {
    const auto& b = cert.params;
    const auto& d = b.data;
    json constraints = json::array();
    for (const auto& c : cert.constraints)
        constraints.push_back({{"name", c.name}, {"lhs", num(c.lhs)}, {"rhs", num(c.rhs)}, {"ok", c.ok}});
    json entries = json::array();
    for (const auto& e : cert.entries)
        entries.push_back({{"eps", num(e.eps)},
                           {"supersolution", residual_obj(e.supersolution)},
                           {"comparison", residual_obj(e.comparison)}});
    json j = {
        {"kind", "barrier_certificate"},
        {"certified", cert.certified},
        {"data",
         {{"p", d.p}, {"q", d.q}, {"N", d.N}, {"rho", d.rho}, {"grad_g", d.grad_g}, {"hess_g", d.hess_g},
          {"g_sup", d.g_sup}, {"g_min", d.g_min}, {"u0_sup", d.u0_sup}, {"u0_lip", d.u0_lip}}},
        {"params",
         {{"beta", num(b.beta)}, {"delta", num(b.delta)}, {"eta", num(b.eta)}, {"K", num(b.K)}, {"C", num(b.C)},
          {"T0", num(b.T0)}, {"delta_power_bound", num(b.delta_power_bound)}}},
        {"M2", num(cert.M2)},
        {"constraints", constraints},
        {"residuals", entries},
    };
    return dump(j);
}

std::string eigen_json(const EigenData& eig, const Grid& grid) {
    return dump({{"kind", "eigen"},
                 {"lambda", num(eig.lambda)},
                 {"residual", num(eig.residual)},
                 {"iterations", eig.iterations},
                 {"grid", grid_obj(grid)}});
}

std::string gbu_json(const GbuAssessment& a) {
    json levels = json::array();
    for (const auto& l : a.levels)
        levels.push_back({{"resolution", l.resolution},
                          {"thresholds", nums(l.thresholds)},
                          {"t_detect", nums(l.t_detect)},
                          {"ratio", num(l.ratio)},
                          {"t_max", num(l.t_max)},
                          {"cauchy", l.cauchy}});
    return dump({{"kind", "gbu_verdict"},
                 {"verdict", to_string(a.verdict)},
                 {"t_max", opt(a.t_max)},
                 {"spread", num(a.spread)},
                 {"levels", levels},
                 {"reason", a.reason}});
}

std::string eps_continuation_json(const EpsContinuationReport& r) {
    return dump({{"kind", "eps_continuation"},
                 {"eps", nums(r.eps)},
                 {"final_times", nums(r.final_times)},
                 {"distances", nums(r.distances)},
                 {"monotone", r.monotone},
                 {"rate", opt(r.rate)}});
}

std::string criterion_json(const CriterionResult& r, double alpha) {
    json probes = json::array();
    for (const auto& p : r.probes)
        probes.push_back({{"amplitude", num(p.amplitude)},
                          {"verdict", to_string(p.verdict)},
                          {"t_detect", opt(p.t_detect)},
                          {"y0", num(p.y0)}});
    return dump({{"kind", "criterion"},
                 {"alpha", num(alpha)},
                 {"a_lo", num(r.a_lo)},
                 {"a_hi", num(r.a_hi)},
                 {"y0_lo", num(r.y0_lo)},
                 {"y0_threshold", num(r.y0_threshold)},
                 {"t_detect", opt(r.t_detect)},
                 {"probes", probes}});
}

std::string blowup_fit_json(const BlowupFit& f) {
    return dump({{"kind", "blowup_fit"},
                 {"C1", num(f.C1)},
                 {"C2", num(f.C2)},
                 {"margin", num(f.margin)},
                 {"samples", f.samples},
                 {"status", to_string(f.status)}});
}

std::string profile_json(const ProfileCheck& c) {
    json frames = json::array();
    for (const auto& f : c.frames)
        frames.push_back({{"t", num(f.t)},
                          {"C1", num(f.C1)},
                          {"slope", num(f.slope)},
                          {"shells", f.shells},
                          {"status", f.status == ProfileStatus::Resolved ? "Resolved" : "InsufficientCollar"}});
    return dump({{"kind", "gradient_profile"},
                 {"C1", num(c.C1)},
                 {"C2", num(c.C2)},
                 {"report", compliance_obj(c.report)},
                 {"frames", frames}});
}

} // namespace gbulab
