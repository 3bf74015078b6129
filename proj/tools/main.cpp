#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "halfline/types.hpp"
#include "runconfig.hpp"
#include "tasks.hpp"

namespace {

int dispatch(const std::string& config_path, bool validate_only, bool plots,
             const std::string& out_override) {
    using namespace halfline;
    using namespace halfline::tools;
    try {
        RunConfig cfg = load_run_config(config_path);
        if (validate_only) {
            std::cout << "ok: task '" << task_name(cfg.task) << "' configuration is valid\n";
            return 0;
        }
        if (!out_override.empty()) cfg.out_dir = out_override;
        cfg.prepare();
        return run_task(cfg, RunOptions{plots});
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const BranchCutError& e) {
        std::cerr << "precondition failure: " << e.what() << "\n";
        return 3;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition failure: " << e.what() << "\n";
        return 3;
    } catch (const StiffnessError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const BlowupError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weyl-disk solver for Schrodinger operators with complex potentials "
                 "on the half-line"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    bool plots = false;

    CLI::App* run = app.add_subcommand("run", "execute the configured task");
    run->add_option("--config", config_path, "TOML run configuration")->required();
    run->add_flag("--plots", plots, "also emit SVG plots");
    run->add_option("--out", out_override, "output directory (overrides [output] dir)");

    CLI::App* validate =
        app.add_subcommand("validate", "parse and schema-check a configuration");
    validate->add_option("--config", config_path, "TOML run configuration")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // command-line misuse counts as a configuration error
    }

    return dispatch(config_path, validate->parsed(), plots, out_override);
}
