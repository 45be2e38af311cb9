#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "centerfield/config.hpp"
#include "centerfield/manifold.hpp"
#include "centerfield/systems.hpp"

namespace centerfield {

/// Orchestration of the full pipeline behind the command line: build the
/// system, run the spectral analysis, solve charts, verify, and export
/// byte-stable artifacts.

enum class Command { spectrum, split, manifold, verify, catalog };

std::optional<Command> parse_command(const std::string& name);

/// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
/// 4 verification failure.
struct ExecutionResult {
    int exit_code = 0;
    std::vector<std::filesystem::path> artifacts;
    std::string message;
};

/// Everything computed once per run: the system, its spectrum, splitting,
/// resolved operator configuration, and the orbit model.
struct Analysis {
    BenchmarkSystem system;
    Realization omega;
    LyapunovSpectrum spectrum;
    OseledetsSplitting splitting;
    OrbitModel model;
};

Analysis analyze(const RunConfig& config);

GridSpec grid_from(const RunConfig& config, const OrbitModel& model);

struct VerificationCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct VerificationSummary {
    std::vector<VerificationCheck> checks;
    std::vector<std::string> flags;
    bool all_passed = true;

    void add(const std::string& name, double measured, double bound, const std::string& detail = "");
    /// For checks of the form measured >= floor.
    void add_min(const std::string& name, double measured, double floor,
                 const std::string& detail = "");
    void add_flag(const std::string& flag) { flags.push_back(flag); }
};

VerificationSummary run_verification(const RunConfig& config, const Analysis& analysis);

/// Run one command end to end. The output directory comes from the config,
/// overridden by `output_override` when set (the CLI wires the environment
/// variable into this).
ExecutionResult execute(Command command, const RunConfig& config,
                        const std::optional<std::filesystem::path>& output_override = {});

/// Catalog listing used by the catalog command.
std::string catalog_text();

} // namespace centerfield
