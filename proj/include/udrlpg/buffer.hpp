#pragma once

// Hindsight replay buffer: fixed-range return buckets with bounded FIFO
// capacity, pluggable sampling strategy, and the command-selection rule.

#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "udrlpg/envs.hpp"
#include "udrlpg/nncore.hpp"
#include "udrlpg/rng.hpp"

namespace udrlpg {

enum class BufferStrategy { buckets_weighted, buckets_uniform, flat_weighted, flat_uniform };

std::string strategy_name(BufferStrategy s);
BufferStrategy strategy_from_name(const std::string& name);

struct BufferEntry {
    double observed_return = 0.0;  // the hindsight label; the command is never stored
    std::vector<double> theta;
    std::size_t birth_iteration = 0;
};

class BucketedBuffer {
public:
    BucketedBuffer(double r_min, double r_max, int n_buckets, int capacity_per_bucket,
                   BufferStrategy strategy);

    // floor((r - r_min) / width); r_max maps to the top bucket. Out-of-range
    // returns are clamped (the clamp count is exposed for diagnostics).
    int bucket_index(double return_value) const;

    void insert(BufferEntry entry);

    // With replacement. Each pair's command is the stored observed return.
    std::vector<std::pair<double, std::vector<double>>> sample(int batch_size, Rng& rng) const;

    // k commands from [0.8*B, min(1.1*B, 1.1*r_max)] where B is the best
    // return in the buffer; the last one is pinned to the ambitious endpoint
    // (the extrapolation probe).
    std::vector<double> select_commands(int k, Rng& rng) const;

    // n random policies, one rollout each, inserted with observed returns.
    void init_random(int n, const NetSpec& policy_spec, Env& env, RunningNorm& norm,
                     std::uint64_t seed);

    std::size_t size() const;
    bool empty() const { return size() == 0; }
    double max_return() const;  // throws when empty
    int n_buckets() const { return static_cast<int>(buckets_.size()); }
    std::size_t bucket_size(int b) const { return buckets_.at(b).size(); }
    std::vector<std::size_t> occupancy() const;
    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }
    BufferStrategy strategy() const { return strategy_; }
    std::size_t clamped_inserts() const { return clamped_inserts_; }

    // Debug dump: return, birth_iteration, first 4 coords, FNV hash of theta.
    std::string dump_csv() const;

    // Sampling probability of each nonempty bucket under buckets_* strategies
    // (frequency tests check empirical draws against these).
    std::vector<double> bucket_probabilities() const;

private:
    const BufferEntry& draw(Rng& rng) const;

    double r_min_, r_max_;
    int capacity_per_bucket_;
    BufferStrategy strategy_;
    std::vector<std::deque<BufferEntry>> buckets_;
    std::size_t clamped_inserts_ = 0;
};

}  // namespace udrlpg
