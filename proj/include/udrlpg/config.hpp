#pragma once

// Run configuration: every knob of a training run, loadable from a TOML file.
// The parser covers the flat subset used here (key = value, strings, numbers,
// booleans, arrays, comments).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "udrlpg/buffer.hpp"

namespace udrlpg {

struct RunConfig {
    std::string env = "cartpole-balance";
    std::uint64_t seed = 0;
    std::string out_dir = "runs/default";

    std::vector<int> policy_hidden = {32};
    std::vector<int> generator_hidden = {64, 64};

    int n_init_random = 50;
    int updates_per_stage = 100;
    int batch_size = 32;
    int rollouts_per_stage = 8;
    int total_stages = 300;
    double sigma = 0.2;

    // fraction of each stage's rollout commands redrawn uniformly from
    // [r_min, best-so-far] instead of the windowed rule; keeps the low and
    // mid command range self-consistent once the window has moved to the top
    double command_explore_frac = 0.5;

    int n_buckets = 10;
    int capacity_per_bucket = 400;
    BufferStrategy strategy = BufferStrategy::buckets_weighted;

    double adam_alpha = 1e-3;

    int n_workers = 4;
    int checkpoint_every = 50;  // "latest" is written every stage regardless
    bool debug_dump = false;

    void validate() const;
    std::string to_toml() const;
    std::string to_json() const;

    static RunConfig from_toml_file(const std::string& path);
    static RunConfig from_toml_text(const std::string& text);
    static RunConfig from_json(const std::string& text);
};

}  // namespace udrlpg
