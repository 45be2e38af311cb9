#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "centerfield/config.hpp"
#include "centerfield/errors.hpp"
#include "centerfield/pipeline.hpp"

namespace {

int run(centerfield::Command command, const std::string& config_path) {
    std::optional<std::filesystem::path> output_override;
    if (const char* env = std::getenv("CENTERFIELD_OUTPUT_DIR"); env && *env)
        output_override = std::filesystem::path(env);

    centerfield::RunConfig config;
    try {
        config = centerfield::load_run_config(config_path);
    } catch (const centerfield::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    const centerfield::ExecutionResult result =
        centerfield::execute(command, config, output_override);
    if (!result.message.empty()) {
        (result.exit_code == 0 || result.exit_code == 4 ? std::cout : std::cerr)
            << result.message;
        if (result.message.back() != '\n') std::cout << "\n";
    }
    for (const auto& artifact : result.artifacts) std::cout << "wrote " << artifact.string() << "\n";
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lyapunov spectra, Oseledets splittings, and local center manifolds\n"
                 "for random dynamical systems at a fixed noise realization"};
    app.require_subcommand(1);

    std::string config_path;

    auto add_run_command = [&](const std::string& name, const std::string& help) {
        CLI::App* cmd = app.add_subcommand(name, help);
        cmd->add_option("config", config_path, "run configuration file")
            ->required()
            ->check(CLI::ExistingFile);
        return cmd;
    };

    CLI::App* spectrum = add_run_command("spectrum", "compute the Lyapunov spectrum");
    CLI::App* split = add_run_command("split", "compute the stable/center/unstable splitting");
    CLI::App* manifold = add_run_command("manifold", "solve the center chart on a grid");
    CLI::App* verify = add_run_command("verify", "run the full verification suite");
    CLI::App* catalog = app.add_subcommand("catalog", "list the benchmark systems");

    CLI11_PARSE(app, argc, argv);

    if (catalog->parsed()) {
        std::cout << centerfield::catalog_text();
        return 0;
    }
    if (spectrum->parsed()) return run(centerfield::Command::spectrum, config_path);
    if (split->parsed()) return run(centerfield::Command::split, config_path);
    if (manifold->parsed()) return run(centerfield::Command::manifold, config_path);
    if (verify->parsed()) return run(centerfield::Command::verify, config_path);
    return 1;
}
