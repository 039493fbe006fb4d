#include "forest/cli.hpp"
#include "forest/report.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

struct CommonOptions {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 12345;
    double h = 0.0;
    double T = 0.0;
    std::vector<std::string> tol;
};

bool parse_tol_pairs(const std::vector<std::string>& pairs,
                     std::map<std::string, double>& overrides) {
    for (const auto& pair : pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "error: --tol expects KEY=VALUE, got '" << pair
                      << "'\n";
            return false;
        }
        const std::string key = pair.substr(0, eq);
        const std::string text = pair.substr(eq + 1);
        double value = 0.0;
        const auto [ptr, ec] =
            std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            std::cerr << "error: --tol " << key << " expects a number, got '"
                      << text << "'\n";
            return false;
        }
        overrides[key] = value;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"forestsim: renewal-equation simulator and certifier for "
                 "size-structured stand dynamics"};
    app.set_help_flag("--help", "print help and exit");
    app.set_version_flag("--version", std::string(forest::k_tool_version));
    app.require_subcommand(1);

    int exit_code = 0;
    const auto add_command = [&](const std::string& name,
                                 const std::string& description) {
        CLI::App* cmd = app.add_subcommand(name, description);
        cmd->set_help_flag("--help", "print help and exit");
        auto opts = std::make_shared<CommonOptions>();
        cmd->add_option("--config", opts->config, "model configuration file")
            ->required();
        cmd->add_option("--h", opts->h, "time step");
        cmd->add_option("--T", opts->T, "horizon");
        cmd->add_option("--out", opts->out, "output directory");
        cmd->add_option("--seed", opts->seed, "scenario generator seed");
        cmd->add_option("--tol", opts->tol,
                        "tolerance override KEY=VALUE (repeatable)");
        cmd->callback([&exit_code, cmd, opts, name] {
            forest::RunManifest manifest;
            manifest.command = name;
            manifest.config_path = opts->config;
            manifest.out_dir = opts->out;
            manifest.seed = opts->seed;
            if (cmd->count("--h") > 0)
                manifest.h = opts->h;
            if (cmd->count("--T") > 0)
                manifest.T = opts->T;
            if (!parse_tol_pairs(opts->tol, manifest.tol_overrides)) {
                exit_code = 2;
                return;
            }
            exit_code = forest::run_command(manifest, std::cout);
        });
    };

    add_command("analyze", "classify the configured model and write a report");
    add_command("simulate", "integrate the configured scenario to a table");
    add_command("verify", "run the certifier battery");
    add_command("convergence", "run the step-refinement study");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e); // prints the usage message
        return 2;          // usage problems share the config-error exit code
    }
    return exit_code;
}
