// Command-line front end: simulate, sweep, verify, emit-defaults.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tumorlab/config.hpp"
#include "tumorlab/runner.hpp"

namespace {

tumorlab::Config load_config(const std::string& path) {
    if (path.empty()) {
        std::istringstream empty("");
        return tumorlab::parse_config(empty);
    }
    return tumorlab::parse_config_file(path);
}

bool verbose_logging() {
    const char* v = std::getenv("TUMORLAB_LOG");
    return v && std::string(v) == "debug";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D finite-volume laboratory for two-population tumor growth"};
    app.require_subcommand(1);

    std::string config_path, out_dir, kind, verify_dir;

    auto* sim = app.add_subcommand("simulate", "run one trajectory and write its outputs");
    sim->add_option("--config", config_path, "configuration file (defaults when omitted)");
    sim->add_option("--out", out_dir, "output directory")->required();

    auto* sw = app.add_subcommand("sweep", "run a parameter sweep with limit diagnostics");
    sw->add_option("--kind", kind, "kappa or eps")->required();
    sw->add_option("--config", config_path, "configuration file (defaults when omitted)");
    sw->add_option("--out", out_dir, "output directory")->required();

    auto* ver = app.add_subcommand("verify", "recheck a previously written output directory");
    ver->add_option("--dir", verify_dir, "directory to verify")->required();

    app.add_subcommand("emit-defaults", "print the default configuration to stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("emit-defaults")) {
            std::cout << tumorlab::emit_defaults();
            return 0;
        }
        if (app.got_subcommand("verify")) return tumorlab::command_verify(verify_dir);

        const tumorlab::Config cfg = load_config(config_path);
        if (verbose_logging())
            std::cerr << "config hash: " << std::hex << tumorlab::config_hash(cfg) << std::dec
                      << "\n";

        const tumorlab::RunManifest m =
            app.got_subcommand("simulate") ? tumorlab::command_simulate(cfg, out_dir)
                                           : tumorlab::command_sweep(cfg, kind, out_dir);
        if (verbose_logging())
            std::cerr << "outputs: " << m.outputs.size() << ", checks: " << m.checks.size()
                      << "\n";
        return m.ok() ? 0 : 1;
    } catch (const tumorlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
