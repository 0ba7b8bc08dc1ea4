#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "hspde/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> paths;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* c = cmd->add_option("--config", args.config_path, "run configuration file");
    if (config_required) c->required();
    cmd->add_option("--seed", args.seed, "root seed (overrides config)");
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--paths", args.paths, "number of paths (overrides config)");
    cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

hspde::RunConfig load(const CommonArgs& args) {
    hspde::RunConfig cfg =
        args.config_path.empty() ? hspde::parse_config_text("grid.dt = 0.01\ngrid.dx = 0.01\n"
                                                            "grid.steps = 100\ngrid.nodes = 0\n"
                                                            "model.driver.type = brownian\n")
                                 : hspde::parse_config_file(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (args.out_dir) cfg.out_dir = *args.out_dir;
    if (args.paths) {
        if (*args.paths == 0) throw hspde::ConfigError("--paths must be >= 1");
        cfg.paths = *args.paths;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperbolic SPDE boundary simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", hspde::kVersion);

    CommonArgs sim_args, bench_args, val_args, fbm_args;
    double fbm_h = 0.75, fbm_eps = 0.01;

    auto* sim = app.add_subcommand("simulate", "solve the field and write outputs");
    add_common(sim, sim_args, true);
    auto* bench = app.add_subcommand("benchmark", "time FD against per-cell re-integration");
    add_common(bench, bench_args, true);
    auto* val = app.add_subcommand("validate", "run the invariant check suites");
    add_common(val, val_args, true);
    auto* fbm = app.add_subcommand("fbm", "simulate a regularized fBm boundary path");
    add_common(fbm, fbm_args, false);
    fbm->add_option("--hurst", fbm_h, "Hurst index in (0,1)");
    fbm->add_option("--eps", fbm_eps, "regularization length > 0");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return hspde::run_simulate(load(sim_args), {sim_args.quiet}, std::cout);
        if (bench->parsed())
            return hspde::run_benchmark(load(bench_args), {bench_args.quiet}, std::cout);
        if (val->parsed()) return hspde::run_validate(load(val_args), {val_args.quiet}, std::cout);
        if (fbm->parsed())
            return hspde::run_fbm(fbm_h, fbm_eps, load(fbm_args), {fbm_args.quiet}, std::cout);
    } catch (const hspde::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const hspde::CflError& e) {
        std::cerr << "CFL violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
