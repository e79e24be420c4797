#include "udrlpg/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace udrlpg {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

NetSpec make_policy_spec(const RunConfig& cfg, const EnvContract& c) {
    NetSpec spec;
    spec.layer_sizes.push_back(c.obs_dim);
    for (int h : cfg.policy_hidden) spec.layer_sizes.push_back(h);
    spec.layer_sizes.push_back(c.action_dim);
    spec.hidden_activation = Activation::tanh;
    spec.output_activation = Activation::tanh;
    spec.validate();
    return spec;
}

struct RolloutOutcome {
    std::vector<double> theta;
    EpisodeResult result;
    std::vector<std::vector<double>> obs_log;
};

nlohmann::json norm_to_json(const RunningNorm& n) {
    return {{"count", n.count}, {"mean", n.mean}, {"m2", n.m2}};
}

RunningNorm norm_from_json(const nlohmann::json& j) {
    RunningNorm n;
    n.count = j.at("count").get<std::size_t>();
    n.mean = j.at("mean").get<std::vector<double>>();
    n.m2 = j.at("m2").get<std::vector<double>>();
    return n;
}

}  // namespace

std::string RunLog::to_csv(int n_buckets) const {
    std::ostringstream out;
    out << "stage,mean_return,max_return,best_so_far,loss_mean,total_env_steps,extrap_commands";
    for (int b = 0; b < n_buckets; ++b) out << ",occ" << b;
    out << "\n";
    for (const StageRecord& r : records) {
        out << r.stage << ',' << fmt(r.mean_return) << ',' << fmt(r.max_return) << ','
            << fmt(r.best_so_far) << ',' << fmt(r.loss_mean) << ',' << r.total_env_steps
            << ',' << r.extrap_commands;
        for (std::size_t occ : r.occupancy) out << ',' << occ;
        out << "\n";
    }
    return out.str();
}

std::string RunLog::timing_csv() const {
    std::ostringstream out;
    out << "stage,wall_ms\n";
    for (const StageRecord& r : records) out << r.stage << ',' << fmt(r.wall_ms) << "\n";
    return out.str();
}

std::string Checkpoint::to_json() const {
    nlohmann::json j;
    j["stage"] = stage;
    j["env"] = env_name;
    j["generator"] = nlohmann::json::parse(params_to_json(generator.rho));
    j["command_norm"] = {{"r_min", generator.command_norm.r_min},
                         {"r_max", generator.command_norm.r_max}};
    j["sigma"] = generator.sigma;
    j["policy"] = {{"layer_sizes", policy_spec.layer_sizes},
                   {"hidden_activation", activation_name(policy_spec.hidden_activation)},
                   {"output_activation", activation_name(policy_spec.output_activation)},
                   {"action_low", action_low},
                   {"action_high", action_high}};
    j["norm"] = norm_to_json(norm);
    j["config"] = nlohmann::json::parse(config.to_json());
    return j.dump();
}

Checkpoint Checkpoint::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    Checkpoint c;
    c.stage = j.at("stage").get<int>();
    c.env_name = j.at("env").get<std::string>();
    c.generator.rho = params_from_json(j.at("generator").dump());
    c.generator.spec = c.generator.rho.spec;
    c.generator.optimizer = AdamState(c.generator.rho.values.size());
    c.generator.command_norm = {j.at("command_norm").at("r_min").get<double>(),
                                j.at("command_norm").at("r_max").get<double>()};
    c.generator.sigma = j.at("sigma").get<double>();
    const nlohmann::json& p = j.at("policy");
    c.policy_spec.layer_sizes = p.at("layer_sizes").get<std::vector<int>>();
    c.policy_spec.hidden_activation =
        activation_from_name(p.at("hidden_activation").get<std::string>());
    c.policy_spec.output_activation =
        activation_from_name(p.at("output_activation").get<std::string>());
    c.action_low = p.at("action_low").get<std::vector<double>>();
    c.action_high = p.at("action_high").get<std::vector<double>>();
    c.norm = norm_from_json(j.at("norm"));
    c.config = RunConfig::from_json(j.at("config").dump());
    return c;
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

void Checkpoint::save(const std::string& path) const { write_file(path, to_json()); }

TrainResult train(const RunConfig& config, bool write_outputs) {
    config.validate();

    std::unique_ptr<Env> env = make_env(config.env);
    const EnvContract contract = env->contract();
    const NetSpec policy_spec = make_policy_spec(config, contract);

    const CommandNorm cnorm{contract.return_min, contract.return_max};
    Generator gen = make_generator(param_count(policy_spec), cnorm, config.sigma,
                                   derive_seed(config.seed, 0xA0), config.adam_alpha,
                                   config.generator_hidden);

    BucketedBuffer buffer(contract.return_min, contract.return_max, config.n_buckets,
                          config.capacity_per_bucket, config.strategy);
    RunningNorm norm(contract.obs_dim);

    std::size_t total_env_steps = 0;
    buffer.init_random(config.n_init_random, policy_spec, *env, norm,
                       derive_seed(config.seed, 0xA1));
    total_env_steps += norm.count;  // one norm update per environment step so far

    Rng sample_rng(derive_seed(config.seed, 0xA2));
    Rng command_rng(derive_seed(config.seed, 0xA3));

    TrainResult result;
    double best_so_far = buffer.max_return();

    const std::filesystem::path out_dir(config.out_dir);
    if (write_outputs) std::filesystem::create_directories(out_dir);

    auto make_checkpoint = [&](int stage) {
        Checkpoint c;
        c.stage = stage;
        c.env_name = config.env;
        c.generator = gen;
        c.policy_spec = policy_spec;
        c.action_low = contract.action_low;
        c.action_high = contract.action_high;
        c.norm = norm;
        c.config = config;
        return c;
    };

    for (int stage = 1; stage <= config.total_stages; ++stage) {
        const auto t_stage = std::chrono::steady_clock::now();

        // --- update stage ---
        double loss_sum = 0.0;
        for (int u = 0; u < config.updates_per_stage; ++u) {
            const auto batch = buffer.sample(config.batch_size, sample_rng);
            loss_sum += train_batch(gen, batch);
        }

        // --- rollout stage ---
        std::vector<double> commands =
            buffer.select_commands(config.rollouts_per_stage, command_rng);
        // redraw a fraction of the non-probe commands across [r_min, best-so-far]
        // so the generator keeps seeing targets below the moving window
        const int n_explore = static_cast<int>(
            config.command_explore_frac * (config.rollouts_per_stage - 1));
        std::uniform_real_distribution<double> low_cmd(contract.return_min, best_so_far);
        for (int i = 0; i < n_explore; ++i) commands[i] = low_cmd(command_rng);
        int extrap = 0;
        for (double c : commands)
            if (c < contract.return_min || c > contract.return_max) ++extrap;

        // rollout workers read an immutable generator and a norm snapshot;
        // seeds are per-(stage, rollout) so any worker count gives the same run
        const RunningNorm norm_snapshot = norm;
        auto run_one = [&, stage](int i) {
            RolloutOutcome out;
            out.theta = perturb(generate(gen, commands[i]), config.sigma,
                                derive_seed(config.seed, 0xB0 + stage, i));
            Policy p{policy_spec,
                     FlatParams{policy_spec, out.theta},
                     contract.action_low,
                     contract.action_high};
            std::unique_ptr<Env> worker_env = make_env(config.env);
            RunningNorm local_norm = norm_snapshot;
            out.result = rollout(*worker_env, p, local_norm,
                                 derive_seed(config.seed, 0xC0 + stage, i), &out.obs_log);
            return out;
        };

        std::vector<RolloutOutcome> outcomes(config.rollouts_per_stage);
        for (int base = 0; base < config.rollouts_per_stage; base += config.n_workers) {
            const int end = std::min(base + config.n_workers, config.rollouts_per_stage);
            std::vector<std::future<RolloutOutcome>> futs;
            for (int i = base; i < end; ++i)
                futs.push_back(std::async(std::launch::async, run_one, i));
            for (int i = base; i < end; ++i) outcomes[i] = futs[i - base].get();
        }

        // apply results in rollout-index order
        double ret_sum = 0.0, ret_max = contract.return_min;
        for (int i = 0; i < config.rollouts_per_stage; ++i) {
            RolloutOutcome& out = outcomes[i];
            for (const std::vector<double>& obs : out.obs_log) norm.update(obs);
            total_env_steps += out.result.steps;
            const double g = out.result.episode_return;
            ret_sum += g;
            ret_max = std::max(ret_max, g);

            // hindsight relabel: the issued command is discarded here
            buffer.insert({.observed_return = g,
                           .theta = std::move(out.theta),
                           .birth_iteration = static_cast<std::size_t>(stage)});
            result.insertions.push_back({.stage = stage,
                                         .issued_command = commands[i],
                                         .observed_return = g,
                                         .stored_return =
                                             std::clamp(g, contract.return_min,
                                                        contract.return_max)});
        }
        best_so_far = std::max(best_so_far, buffer.max_return());

        StageRecord rec;
        rec.stage = stage;
        rec.mean_return = ret_sum / config.rollouts_per_stage;
        rec.max_return = ret_max;
        rec.best_so_far = best_so_far;
        rec.loss_mean = loss_sum / config.updates_per_stage;
        rec.total_env_steps = total_env_steps;
        rec.extrap_commands = extrap;
        rec.occupancy = buffer.occupancy();
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t_stage)
                          .count();
        result.log.records.push_back(std::move(rec));

        if (write_outputs) {
            const Checkpoint ckpt = make_checkpoint(stage);
            if (stage % config.checkpoint_every == 0 || stage == config.total_stages)
                ckpt.save((out_dir / ("checkpoint_stage_" + std::to_string(stage) + ".json"))
                              .string());
            ckpt.save((out_dir / "checkpoint_latest.json").string());
        }
    }

    result.checkpoint = make_checkpoint(config.total_stages);
    if (config.debug_dump) result.buffer_dump = buffer.dump_csv();

    if (write_outputs) {
        write_file(out_dir / "runlog.csv", result.log.to_csv(config.n_buckets));
        write_file(out_dir / "timing.csv", result.log.timing_csv());
        write_file(out_dir / "config.toml", config.to_toml());
        if (config.total_stages == 0)
            result.checkpoint.save((out_dir / "checkpoint_latest.json").string());
        if (config.debug_dump) {
            write_file(out_dir / "buffer_dump.csv", result.buffer_dump);
            std::ostringstream ins;
            ins << "stage,issued_command,observed_return,stored_return\n";
            for (const InsertionRecord& r : result.insertions)
                ins << r.stage << ',' << fmt(r.issued_command) << ',' << fmt(r.observed_return)
                    << ',' << fmt(r.stored_return) << "\n";
            write_file(out_dir / "insertions.csv", ins.str());
        }
    }
    return result;
}

EvalResult evaluate(const Checkpoint& ckpt, double command, int episodes, std::uint64_t seed) {
    std::unique_ptr<Env> env = make_env(ckpt.env_name);
    // no exploration noise at evaluation
    const std::vector<double> theta = generate(ckpt.generator, command);
    Policy p{ckpt.policy_spec, FlatParams{ckpt.policy_spec, theta}, ckpt.action_low,
             ckpt.action_high};
    RunningNorm norm = ckpt.norm;

    EvalResult res;
    for (int e = 0; e < episodes; ++e) {
        const EpisodeResult r = rollout(*env, p, norm, derive_seed(seed, 0xE0, e));
        res.returns.push_back(r.episode_return);
        res.mean_return += r.episode_return;
    }
    res.mean_return /= episodes;
    return res;
}

}  // namespace udrlpg
