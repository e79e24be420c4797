#pragma once

// Deterministic control policy pi_theta plus the shared running observation
// normalizer. Exploration happens in parameter space, never in action space.

#include <span>
#include <vector>

#include "udrlpg/nncore.hpp"

namespace udrlpg {

struct Policy {
    NetSpec spec;  // output_activation must be tanh
    FlatParams params;
    std::vector<double> action_low;
    std::vector<double> action_high;
};

// Welford online mean/variance, one slot per observation coordinate.
struct RunningNorm {
    std::size_t count = 0;
    std::vector<double> mean;
    std::vector<double> m2;

    explicit RunningNorm(std::size_t dim = 0) : mean(dim, 0.0), m2(dim, 0.0) {}

    void update(std::span<const double> obs);
    // (obs - mean) / sqrt(var + 1e-8), clipped to +-10. Identity while count < 2.
    std::vector<double> normalize(std::span<const double> obs) const;
    std::vector<double> variance() const;  // m2 / max(count-1, 1)
};

// action = low + (tanh(net(normalize(obs))) + 1)/2 * (high - low)
std::vector<double> act(const Policy& policy, std::span<const double> obs,
                        const RunningNorm& norm);

Policy random_policy(const NetSpec& spec, std::vector<double> action_low,
                     std::vector<double> action_high, std::uint64_t seed);

}  // namespace udrlpg
