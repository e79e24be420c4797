// Command-line front end: train / eval / identity / ablate / variance.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "udrlpg/evalsuite.hpp"
#include "udrlpg/trainer.hpp"

using namespace udrlpg;

int main(int argc, char** argv) {
    CLI::App app{"UDRLPG: command-conditioned policy generation"};
    app.require_subcommand(1);

    std::string config_path, checkpoint_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double command = 0.0;
    int episodes = 10;
    int points = 10;
    std::vector<std::uint64_t> seeds;

    CLI::App* train_cmd = app.add_subcommand("train", "run the full training loop");
    train_cmd->add_option("--config", config_path, "TOML run config")->required();
    train_cmd->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_given = true; });

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint at one command");
    eval_cmd->add_option("--checkpoint", checkpoint_path)->required();
    eval_cmd->add_option("--command", command)->required();
    eval_cmd->add_option("--episodes", episodes);
    eval_cmd->add_option("--seed", seed);

    CLI::App* id_cmd = app.add_subcommand("identity", "identity curve for a checkpoint");
    id_cmd->add_option("--checkpoint", checkpoint_path)->required();
    id_cmd->add_option("--points", points);
    id_cmd->add_option("--episodes", episodes);
    id_cmd->add_option("--seed", seed);

    CLI::App* abl_cmd = app.add_subcommand("ablate", "four-way buffer strategy ablation");
    abl_cmd->add_option("--config", config_path)->required();
    abl_cmd->add_option("--seeds", seeds, "seed list")->required()->expected(-1);

    CLI::App* var_cmd = app.add_subcommand("variance", "final-return dispersion over seeds");
    var_cmd->add_option("--config", config_path)->required();
    var_cmd->add_option("--seeds", seeds, "seed list")->required()->expected(-1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) {
            RunConfig cfg = RunConfig::from_toml_file(config_path);
            if (seed_given) cfg.seed = seed;
            const TrainResult res = train(cfg);
            std::cout << "final_stage," << res.checkpoint.stage << "\n";
            if (!res.log.records.empty())
                std::cout << "best_return," << res.log.records.back().best_so_far << "\n"
                          << "final_mean_return," << res.log.records.back().mean_return
                          << "\n";
            std::cout << "out_dir," << cfg.out_dir << "\n";
        } else if (eval_cmd->parsed()) {
            const Checkpoint ckpt = Checkpoint::load(checkpoint_path);
            const EvalResult res = evaluate(ckpt, command, episodes, seed);
            std::cout << "episode,return\n";
            for (std::size_t i = 0; i < res.returns.size(); ++i)
                std::cout << i << ',' << res.returns[i] << "\n";
            std::cout << "mean," << res.mean_return << "\n";
        } else if (id_cmd->parsed()) {
            const Checkpoint ckpt = Checkpoint::load(checkpoint_path);
            std::cout << identity_curve(ckpt, points, episodes, seed).to_csv();
        } else if (abl_cmd->parsed()) {
            const RunConfig base = RunConfig::from_toml_file(config_path);
            const AblationReport report = ablation(base, seeds);
            std::cout << report.summary_csv();
            if (report.strategies.size() < 4) return 1;  // a strategy run failed
        } else if (var_cmd->parsed()) {
            const RunConfig base = RunConfig::from_toml_file(config_path);
            std::cout << final_variance({base}, seeds).to_csv();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
