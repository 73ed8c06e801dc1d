#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv)
{
    using risra::cli::RunManifest;

    CLI::App app{"Opportunistic subarray-grouping random access: solver and simulator"};
    app.require_subcommand(1);

    RunManifest manifest;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string strategy;
    std::size_t frames = 0;
    double lambda = 0.0;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--config", manifest.config_path, "flat key = value config file");
        sub->add_option("--out", manifest.out_path, "output file");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--threads", threads, "worker threads");
        sub->add_option("--set", manifest.overrides, "override a config key (key=value), repeatable");
        sub->add_option("--strategy", strategy,
                        "PROPOSED | DIRECT_ONLY | DIRECT_RIS_FULL | OPTSTOP_ELEMENTWISE | OPTSTOP_FULLARRAY");
        sub->add_option("--frames", frames, "frames to simulate");
    };

    auto* solve = app.add_subcommand("solve", "compute the throughput threshold offline");
    auto* simulate = app.add_subcommand("simulate", "simulate one strategy frame by frame");
    auto* sweep = app.add_subcommand("sweep", "solve and simulate every strategy over the configured grid");
    auto* validate = app.add_subcommand("validate", "run the invariant and oracle checks");
    for (auto* sub : {solve, simulate, sweep, validate}) {
        common(sub);
    }
    simulate->add_option("--solution", manifest.solution_path, "solution file written by solve");
    simulate->add_option("--lambda", lambda, "threshold given inline");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : risra::cli::kConfigError;
    }

    for (auto* sub : app.get_subcommands()) {
        manifest.subcommand = sub->get_name();
        if (sub->count("--seed") > 0) {
            manifest.seed = seed;
        }
        if (sub->count("--threads") > 0) {
            manifest.threads = threads;
        }
        if (sub->count("--strategy") > 0) {
            manifest.strategy = strategy;
        }
        if (sub->count("--frames") > 0) {
            manifest.frames = frames;
        }
        if (sub == simulate && sub->count("--lambda") > 0) {
            manifest.lambda = lambda;
        }
    }
    return risra::cli::run(manifest, std::cout, std::cerr);
}
