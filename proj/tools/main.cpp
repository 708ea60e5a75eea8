#include <CLI11.hpp>

#include "effham/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"effham: minimal-dissipation effective Hamiltonians for open quantum systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output;
    bool verbose = false;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--output", output, "output directory (overrides the config)");
    app.add_flag("--verbose", verbose, "progress messages on stderr");

    // Subcommands select the operation; the config's command field must match.
    for (const char* name : {"split", "expand", "oracle", "sweep"})
        app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : effham::kExitConfig;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    return effham::run_cli(config_path, output, verbose, sub);
}
