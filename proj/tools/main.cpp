// precs CLI: evolve | grid | verify
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "precs/precs.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<double> eps;
    std::optional<int> n_max;
    int gap_cells{0};
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration file")
        ->required();
    cmd->add_option("--out", args.out, "output directory (overrides config)");
    cmd->add_option("--eps", args.eps, "support threshold (overrides config)");
    cmd->add_option("--nmax", args.n_max, "Fock truncation (overrides config)");
    cmd->add_option("--gap-cells", args.gap_cells,
                    "require supports separated by more than this many cells");
}

int load_and_apply(const CommonArgs& args, precs::io::RunConfig& cfg) {
    try {
        cfg = precs::io::load_config(args.config_path);
    } catch (const precs::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return precs::cli::kExitConfig;
    }
    if (args.out) cfg.out_dir = *args.out;
    if (args.eps) cfg.eps = *args.eps;
    if (args.n_max) cfg.n_max = *args.n_max;
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) {
        std::cerr << "config error: eps must lie in (0,1)\n";
        return precs::cli::kExitConfig;
    }
    if (cfg.n_max < 1) {
        std::cerr << "config error: n_max must be >= 1\n";
        return precs::cli::kExitConfig;
    }
    return precs::cli::kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coherent-state simulator of unitary pre-measurement dynamics"};
    app.require_subcommand(1);

    CommonArgs evolve_args, grid_args, verify_args;
    double grid_time = 0.0;

    CLI::App* evolve = app.add_subcommand("evolve", "emit the evolve.csv time series");
    add_common(evolve, evolve_args);

    CLI::App* grid = app.add_subcommand("grid", "emit a phase-space snapshot CSV");
    add_common(grid, grid_args);
    grid->add_option("--time", grid_time, "snapshot time")->required();

    CLI::App* verify = app.add_subcommand("verify", "run the oracle cross-checks");
    add_common(verify, verify_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return precs::cli::kExitConfig;
    }

    precs::io::RunConfig cfg;
    precs::cli::Options opt;

    if (evolve->parsed()) {
        if (int rc = load_and_apply(evolve_args, cfg)) return rc;
        opt.gap_cells = evolve_args.gap_cells;
        return precs::cli::cmd_evolve(cfg, std::cout, opt);
    }
    if (grid->parsed()) {
        if (int rc = load_and_apply(grid_args, cfg)) return rc;
        opt.gap_cells = grid_args.gap_cells;
        return precs::cli::cmd_grid(cfg, grid_time, std::cout, opt);
    }
    if (int rc = load_and_apply(verify_args, cfg)) return rc;
    opt.gap_cells = verify_args.gap_cells;
    return precs::cli::cmd_verify(cfg, std::cout, opt);
}
