#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace risra::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationFailure = 1,
    kConfigError = 2,
};

struct RunManifest {
    std::string subcommand;
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::vector<std::string> overrides; // key=value
    std::optional<std::string> strategy;
    std::optional<std::size_t> frames;
    std::string solution_path;
    std::optional<double> lambda;
};

/// Offline fixed point; writes the solution file to out_path.
int cmd_solve(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// One simulation; appends a CSV row to out_path (header when the file is new).
int cmd_simulate(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// Solve-then-simulate over the configured grid; writes the CSV table.
int cmd_sweep(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// Invariant and oracle checks; kValidationFailure when any check fails.
int cmd_validate(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// Dispatches on manifest.subcommand and maps exceptions to exit codes.
int run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

} // namespace risra::cli
