#pragma once

// The UDRLPG outer loop: alternate generator regression on buffer samples
// (update stage) with generate / perturb / evaluate / relabel / insert
// (rollout stage). Fully determined by the master seed for any worker count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "udrlpg/buffer.hpp"
#include "udrlpg/config.hpp"
#include "udrlpg/generator.hpp"
#include "udrlpg/policy.hpp"

namespace udrlpg {

struct StageRecord {
    int stage = 0;
    double mean_return = 0.0;
    double max_return = 0.0;
    double best_so_far = 0.0;
    double loss_mean = 0.0;
    std::size_t total_env_steps = 0;
    int extrap_commands = 0;  // commands issued outside the known return range
    std::vector<std::size_t> occupancy;
    double wall_ms = 0.0;  // kept out of the runlog CSV; see timing.csv
};

struct RunLog {
    std::vector<StageRecord> records;
    std::string to_csv(int n_buckets) const;      // deterministic columns only
    std::string timing_csv() const;               // stage, wall_ms
};

// One row per rollout-stage insertion; the hindsight audit trail.
struct InsertionRecord {
    int stage = 0;
    double issued_command = 0.0;
    double observed_return = 0.0;
    double stored_return = 0.0;
};

struct Checkpoint {
    int stage = 0;
    std::string env_name;
    Generator generator;
    NetSpec policy_spec;
    std::vector<double> action_low, action_high;
    RunningNorm norm;
    RunConfig config;

    std::string to_json() const;
    static Checkpoint from_json(const std::string& text);
    static Checkpoint load(const std::string& path);
    void save(const std::string& path) const;
};

struct TrainResult {
    Checkpoint checkpoint;
    RunLog log;
    std::vector<InsertionRecord> insertions;
    std::string buffer_dump;  // CSV, filled when config.debug_dump
};

// Runs the full loop and writes runlog.csv, timing.csv and checkpoints under
// config.out_dir. Set write_outputs = false for in-memory runs (tests).
TrainResult train(const RunConfig& config, bool write_outputs = true);

struct EvalResult {
    double mean_return = 0.0;
    std::vector<double> returns;
};

// sigma = 0: one policy decoded per command, `episodes` seeded rollouts with
// a private copy of the checkpoint normalizer (still updated online).
EvalResult evaluate(const Checkpoint& ckpt, double command, int episodes, std::uint64_t seed);

}  // namespace udrlpg
