#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oda/experiment.hpp"

namespace {

struct SubcommandArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::int64_t> seed;
};

void add_common_options(CLI::App* cmd, SubcommandArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "seed override (takes precedence over the config)");
}

int run(oda::ExperimentMode mode, const SubcommandArgs& args) {
    oda::ExperimentConfig cfg;
    try {
        cfg = oda::load_config(args.config_path);
    } catch (const std::exception& e) {
        std::cerr << "config/input error: " << e.what() << '\n';
        return 2;
    }
    if (cfg.mode != mode) {
        std::cerr << "config/input error: config mode '" << oda::mode_token(cfg.mode)
                  << "' does not match subcommand '" << oda::mode_token(mode) << "'\n";
        return 2;
    }
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed) cfg.seed = static_cast<std::uint64_t>(*args.seed);
    return oda::run_experiment(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Progressive prototype learning: annealed clustering, classification,\n"
                 "and adaptive state-action aggregation for tabular Q-learning."};
    app.require_subcommand(1);

    SubcommandArgs cluster_args, classify_args, rl_args, compare_args;
    CLI::App* cluster = app.add_subcommand("cluster", "unsupervised annealing run");
    add_common_options(cluster, cluster_args);
    CLI::App* classify = app.add_subcommand("classify", "supervised annealing run");
    add_common_options(classify, classify_args);
    CLI::App* rl = app.add_subcommand("rl-cartpole", "two-timescale Q-learning on cart-pole");
    add_common_options(rl, rl_args);
    CLI::App* compare =
        app.add_subcommand("compare-baselines", "distortion curves vs k-means, sVQ and batch DA");
    add_common_options(compare, compare_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (cluster->parsed()) return run(oda::ExperimentMode::Cluster, cluster_args);
    if (classify->parsed()) return run(oda::ExperimentMode::Classify, classify_args);
    if (rl->parsed()) return run(oda::ExperimentMode::RlCartpole, rl_args);
    if (compare->parsed()) return run(oda::ExperimentMode::CompareBaselines, compare_args);
    return 2;
}
