#include <iostream>

#include <CLI11.hpp>

#include "lasim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"link adaptation simulator"};
    app.require_subcommand(1);

    lasim::cli::RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "run an experiment and write traces + summary");
    run->add_option("--preset", run_args.preset, "built-in experiment preset");
    run->add_option("--config", run_args.config_path, "experiment config file (.json or .toml)");
    run->add_option("--set", run_args.overrides, "override KEY=VALUE (dotted paths, repeatable)");
    run->add_option("--out", run_args.out_dir, "output directory")->capture_default_str();
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = run->add_option("--seed", seed, "base seed override");
    run->add_option("--parallel", run_args.parallel, "worker threads")->capture_default_str();
    run->add_flag("--dump-pmf", run_args.dump_pmf, "write per-TTI belief PMFs for run 0");
    run->add_flag("--dump-channel", run_args.dump_channel,
                  "write run-0 effective SINR trajectories");

    lasim::cli::CompareArgs cmp_args;
    CLI::App* cmp = app.add_subcommand("compare", "tabulate throughput ratios across summaries");
    cmp->add_option("summaries", cmp_args.summary_paths, "summary.json files")
        ->required()
        ->expected(2, -1);
    cmp->add_option("--factor", cmp_args.flag_factor, "flag TTIs at or above this ratio")
        ->capture_default_str();

    CLI::App* presets = app.add_subcommand("presets", "list built-in presets");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (*seed_opt) run_args.seed = seed;
        return lasim::cli::cmd_run(run_args, std::cout, std::cerr);
    }
    if (cmp->parsed()) return lasim::cli::cmd_compare(cmp_args, std::cout, std::cerr);
    if (presets->parsed()) return lasim::cli::cmd_presets(std::cout);
    return 1;
}
