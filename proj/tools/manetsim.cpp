// Command-line front end: run experiment spec files or the built-in
// figure-style studies, emitting CSV.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "manet/experiment.hpp"

namespace {

std::string default_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("MANETSIM_OUT"); env && *env) return env;
    return ".";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multihop ad hoc network simulator and analytic toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string builtin_name;
    std::string out_dir;
    int seeds = 10;

    CLI::App* run_cmd = app.add_subcommand("run", "run an experiment spec file");
    run_cmd->add_option("config", config_path, "experiment spec file")->required();
    run_cmd->add_option("--seeds", seeds, "replications per sweep point (overrides the file)");
    run_cmd->add_option("--out", out_dir, "output directory (or MANETSIM_OUT)");

    CLI::App* builtin_cmd = app.add_subcommand("builtin", "run a built-in experiment");
    builtin_cmd->add_option("name", builtin_name, "one of fig5 fig6 fig7 fig8 fig9 fig10")
        ->required();
    builtin_cmd->add_option("--seeds", seeds, "replications per scenario");
    builtin_cmd->add_option("--out", out_dir, "output directory (or MANETSIM_OUT)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            manet::ExperimentSpec spec = manet::parse_config(config_path);
            if (run_cmd->count("--seeds") > 0) spec.n_seeds = seeds;
            spec.out_dir = default_out_dir(out_dir);
            manet::run_experiment(spec);
        } else {
            manet::run_builtin(builtin_name, seeds, default_out_dir(out_dir));
        }
    } catch (const manet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
