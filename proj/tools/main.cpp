#include <iostream>

#include <CLI11.hpp>

#include "dispatch.hpp"

int main(int argc, char** argv) {
    using namespace gbulab::cli;

    CLI::App app{"gbulab: finite-difference lab for degenerate diffusion with gradient source"};
    app.require_subcommand(1);

    Invocation inv;
    const std::vector<std::pair<const char*, const char*>> verbs{
        {"simulate", "integrate one problem and write the run report, monitors and snapshots"},
        {"continue-eps", "solve for a decreasing eps sequence and compare final fields"},
        {"detect-gbu", "threshold/resolution sweep with a gradient blow-up verdict"},
        {"certify-barrier", "search and certify boundary barrier parameters"},
        {"bisect-criterion", "bisect the initial amplitude between completion and blow-up"},
        {"check", "run the compliance suite on a simulation or a trajectory file"},
        {"eig", "principal Dirichlet eigenpair of the configured grid"},
    };
    for (const auto& [name, help] : verbs) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", inv.config_path, "run configuration (key = value with [sections])")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", inv.out, "output directory (default: [experiment] output, then $GBULAB_OUT, then .)");
        sub->add_option("--jobs", inv.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
        sub->add_option("--seed", inv.seed, "seed for randomized suites (overrides [experiment] seed)");
        sub->callback([&inv, sub] { inv.verb = sub->get_name(); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kConfigError;
    }
    return run_command(inv, std::cerr);
}
