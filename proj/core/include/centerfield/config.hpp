#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "centerfield/fiber.hpp"
#include "centerfield/lp.hpp"

namespace centerfield {

/// Flat key-value run configuration with dotted section names. Unknown keys
/// are hard errors; parse failures carry the offending line number.

struct RunConfig {
    int schema = 1;
    std::string system_name;
    std::uint64_t seed = 42;
    std::map<std::string, double> system_params;

    std::optional<NormKind> fiber_norm; ///< euclidean or weighted-2 override
    std::vector<double> fiber_weights;

    std::optional<int> met_exponents; ///< default: fiber dimension
    std::int64_t met_steps = 10000;
    double met_gap = 0.05;
    std::optional<std::int64_t> met_orbit; ///< splitting half-width
    std::int64_t met_horizon = 25;
    std::int64_t met_warmup = 256;
    double met_safety = 1.25;

    LPSettings lp;

    std::optional<double> grid_radius; ///< default: min cutoff radius / 2
    int grid_points = 21;

    std::int64_t verify_steps = 5;
    std::int64_t verify_samples = 32;

    std::string output_directory = "out";
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Reference listing of recognized keys, for documentation and messages.
std::vector<std::string> config_keys();

} // namespace centerfield
