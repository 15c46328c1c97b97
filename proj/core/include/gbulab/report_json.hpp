#pragma once

#include <span>
#include <string>

#include "gbulab/analysis.hpp"
#include "gbulab/barriers.hpp"
#include "gbulab/gbu_detect.hpp"
#include "gbulab/spectral.hpp"
#include "gbulab/timestepper.hpp"

namespace gbulab {

/// Serializers for the machine-readable outputs. Every function returns one
/// JSON document (pretty-printed); non-finite numbers are written as null.

std::string grid_json(const Grid& grid);

/// RunReport plus spec/grid echo and the monitor time series (wall time is the
/// only field that varies between identical runs).
std::string run_report_json(const RunReport& report, const Trajectory& traj, const std::string& config_text = "");

/// Monitor series as CSV: t,max_u,min_u,grad_inf,y,ut_l2_acc.
std::string monitor_csv(const Trajectory& traj);

std::string compliance_json(const ComplianceReport& report);

/// Aggregate verdict document: {"pass": all pass, "checks": [...]}.
std::string verdict_json(std::span<const ComplianceReport> reports, const std::string& suite);

/// Shell table as CSV: delta_shell,max_grad,bound_value.
std::string shell_csv(std::span<const ShellRow> rows);

std::string barrier_json(const BarrierCertificate& cert);

std::string eigen_json(const EigenData& eig, const Grid& grid);

std::string gbu_json(const GbuAssessment& assessment);

std::string eps_continuation_json(const EpsContinuationReport& report);

std::string criterion_json(const CriterionResult& result, double alpha);

std::string blowup_fit_json(const BlowupFit& fit);

std::string profile_json(const ProfileCheck& check);

} // namespace gbulab
