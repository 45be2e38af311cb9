#include "centerfield/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "centerfield/errors.hpp"
#include "centerfield/io.hpp"

namespace centerfield {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& message) {
    raise(errc::config_error, "line " + std::to_string(line) + ": " + message);
}

double parse_number(const std::string& value, std::size_t line) {
    try {
        std::size_t used = 0;
        const double out = std::stod(value, &used);
        if (used != value.size()) fail(line, "trailing characters after number '" + value + "'");
        if (!std::isfinite(out)) fail(line, "number must be finite");
        return out;
    } catch (const Error&) {
        throw;
    } catch (...) {
        fail(line, "cannot parse number '" + value + "'");
    }
}

std::int64_t parse_integer(const std::string& value, std::size_t line) {
    std::int64_t out = 0;
    const auto* begin = value.data();
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) fail(line, "cannot parse integer '" + value + "'");
    return out;
}

std::uint64_t parse_unsigned(const std::string& value, std::size_t line) {
    std::uint64_t out = 0;
    const auto* begin = value.data();
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) fail(line, "cannot parse seed '" + value + "'");
    return out;
}

} // namespace

std::vector<std::string> config_keys() {
    return {
        "schema",          "system.name",       "system.seed",       "system.param.*",
        "fiber.norm",      "fiber.weights",     "met.exponents",     "met.steps",
        "met.gap",         "met.orbit",         "met.horizon",       "met.warmup",
        "met.safety",
        "lp.nu",           "lp.epsilon",        "lp.window",         "lp.tolerance",
        "lp.max_iterations", "lp.radius_mode",  "grid.radius",       "grid.points",
        "verify.steps",    "verify.samples",    "output.directory",
    };
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig config;
    bool saw_schema = false;
    bool saw_system = false;

    std::size_t line_number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto newline = text.find('\n', start);
        std::string raw = newline == std::string::npos ? text.substr(start)
                                                       : text.substr(start, newline - start);
        start = newline == std::string::npos ? text.size() + 1 : newline + 1;
        ++line_number;

        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_number, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_number, "empty key");
        if (value.empty()) fail(line_number, "empty value for '" + key + "'");

        if (key == "schema") {
            if (parse_integer(value, line_number) != 1)
                fail(line_number, "unrecognized schema version '" + value + "'");
            saw_schema = true;
        } else if (key == "system.name") {
            config.system_name = value;
            saw_system = true;
        } else if (key == "system.seed") {
            config.seed = parse_unsigned(value, line_number);
        } else if (key.rfind("system.param.", 0) == 0) {
            const std::string name = key.substr(std::string("system.param.").size());
            if (name.empty()) fail(line_number, "empty parameter name");
            config.system_params[name] = parse_number(value, line_number);
        } else if (key == "fiber.norm") {
            if (value == "euclidean")
                config.fiber_norm = NormKind::euclidean;
            else if (value == "weighted-2")
                config.fiber_norm = NormKind::weighted_p;
            else
                fail(line_number, "fiber.norm must be 'euclidean' or 'weighted-2'");
        } else if (key == "fiber.weights") {
            config.fiber_weights.clear();
            std::size_t pos = 0;
            while (pos <= value.size()) {
                auto comma = value.find(',', pos);
                const std::string item =
                    trim(comma == std::string::npos ? value.substr(pos)
                                                    : value.substr(pos, comma - pos));
                if (item.empty()) fail(line_number, "empty weight entry");
                config.fiber_weights.push_back(parse_number(item, line_number));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        } else if (key == "met.exponents") {
            config.met_exponents = static_cast<int>(parse_integer(value, line_number));
            if (*config.met_exponents < 1) fail(line_number, "met.exponents must be >= 1");
        } else if (key == "met.steps") {
            config.met_steps = parse_integer(value, line_number);
            if (config.met_steps < 1) fail(line_number, "met.steps must be >= 1");
        } else if (key == "met.gap") {
            config.met_gap = parse_number(value, line_number);
            if (!(config.met_gap > 0.0)) fail(line_number, "met.gap must be positive");
        } else if (key == "met.orbit") {
            if (value != "auto") {
                config.met_orbit = parse_integer(value, line_number);
                if (*config.met_orbit < 1) fail(line_number, "met.orbit must be >= 1");
            }
        } else if (key == "met.horizon") {
            config.met_horizon = parse_integer(value, line_number);
            if (config.met_horizon < 1) fail(line_number, "met.horizon must be >= 1");
        } else if (key == "met.warmup") {
            config.met_warmup = parse_integer(value, line_number);
            if (config.met_warmup < 0) fail(line_number, "met.warmup must be >= 0");
        } else if (key == "met.safety") {
            config.met_safety = parse_number(value, line_number);
            if (!(config.met_safety >= 1.0)) fail(line_number, "met.safety must be >= 1");
        } else if (key == "lp.nu") {
            if (value == "auto") {
                config.lp.nu_auto = true;
            } else {
                config.lp.nu_auto = false;
                config.lp.nu = parse_number(value, line_number);
                if (!(config.lp.nu > 0.0)) fail(line_number, "lp.nu must be positive");
            }
        } else if (key == "lp.epsilon") {
            if (value == "auto") {
                config.lp.epsilon_auto = true;
            } else {
                config.lp.epsilon_auto = false;
                config.lp.epsilon = parse_number(value, line_number);
                if (!(config.lp.epsilon > 0.0)) fail(line_number, "lp.epsilon must be positive");
            }
        } else if (key == "lp.window") {
            config.lp.window = parse_integer(value, line_number);
            if (config.lp.window < 2) fail(line_number, "lp.window must be >= 2");
        } else if (key == "lp.tolerance") {
            config.lp.tolerance = parse_number(value, line_number);
            if (!(config.lp.tolerance > 0.0)) fail(line_number, "lp.tolerance must be positive");
        } else if (key == "lp.max_iterations") {
            config.lp.max_iterations = parse_integer(value, line_number);
            if (config.lp.max_iterations < 1) fail(line_number, "lp.max_iterations must be >= 1");
        } else if (key == "lp.radius_mode") {
            if (value == "system")
                config.lp.radius_mode = RadiusMode::system;
            else if (value == "certified")
                config.lp.radius_mode = RadiusMode::certified;
            else
                fail(line_number, "lp.radius_mode must be 'system' or 'certified'");
        } else if (key == "grid.radius") {
            if (value != "auto") {
                config.grid_radius = parse_number(value, line_number);
                if (!(*config.grid_radius > 0.0)) fail(line_number, "grid.radius must be positive");
            }
        } else if (key == "grid.points") {
            config.grid_points = static_cast<int>(parse_integer(value, line_number));
            if (config.grid_points < 1) fail(line_number, "grid.points must be >= 1");
        } else if (key == "verify.steps") {
            config.verify_steps = parse_integer(value, line_number);
            if (config.verify_steps < 1) fail(line_number, "verify.steps must be >= 1");
        } else if (key == "verify.samples") {
            config.verify_samples = parse_integer(value, line_number);
            if (config.verify_samples < 1) fail(line_number, "verify.samples must be >= 1");
        } else if (key == "output.directory") {
            config.output_directory = value;
        } else {
            fail(line_number, "unknown key '" + key + "'");
        }
    }

    if (!saw_schema) raise(errc::config_error, "missing mandatory 'schema' key");
    if (!saw_system) raise(errc::config_error, "missing mandatory 'system.name' key");
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_text_file(path));
}

} // namespace centerfield
