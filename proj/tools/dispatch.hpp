#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace gbulab::cli {

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kConfigError = 2, kRuntimeFailure = 3 };

/// One command-line call: verb plus the global flags.
struct Invocation {
    std::string verb;
    std::string config_path;
    std::optional<std::string> out;
    std::size_t jobs = 1;
    std::optional<std::uint64_t> seed;
};

/// --out, then [experiment] output, then the GBULAB_OUT value, then ".".
std::filesystem::path resolve_output(const std::optional<std::string>& flag, const std::string& configured,
                                     const char* env);

struct DispatchResult {
    bool pass = true;
    std::vector<std::filesystem::path> artifacts;
};

/// Runs the experiment described by cfg and writes every artifact below out.
/// Relative input paths in cfg are taken relative to base.
DispatchResult dispatch(const RunConfig& cfg, const std::filesystem::path& out, std::size_t jobs,
                        const std::filesystem::path& base = ".");

/// Full command: load, override, dispatch, map failures to exit codes and write
/// error.json on failure. Progress and errors go to log.
int run_command(const Invocation& inv, std::ostream& log);

} // namespace gbulab::cli
