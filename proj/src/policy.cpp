#include "udrlpg/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace udrlpg {

void RunningNorm::update(std::span<const double> obs) {
    if (obs.size() != mean.size())
        throw std::invalid_argument("RunningNorm::update: dimension mismatch");
    count += 1;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double delta = obs[i] - mean[i];
        mean[i] += delta / static_cast<double>(count);
        m2[i] += delta * (obs[i] - mean[i]);
    }
}

std::vector<double> RunningNorm::variance() const {
    std::vector<double> var(m2.size());
    const double denom = static_cast<double>(std::max<std::size_t>(count - 1, 1));
    for (std::size_t i = 0; i < m2.size(); ++i) var[i] = m2[i] / denom;
    return var;
}

std::vector<double> RunningNorm::normalize(std::span<const double> obs) const {
    if (obs.size() != mean.size())
        throw std::invalid_argument("RunningNorm::normalize: dimension mismatch");
    if (count < 2) return {obs.begin(), obs.end()};
    const std::vector<double> var = variance();
    std::vector<double> out(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double z = (obs[i] - mean[i]) / std::sqrt(var[i] + 1e-8);
        out[i] = std::clamp(z, -10.0, 10.0);
    }
    return out;
}

std::vector<double> act(const Policy& policy, std::span<const double> obs,
                        const RunningNorm& norm) {
    for (double x : obs)
        if (!std::isfinite(x))
            throw std::runtime_error("act: non-finite observation from environment step");
    const std::vector<double> z = norm.normalize(obs);
    // net ends in tanh, so out is already in (-1, 1)
    const std::vector<double> out = forward(policy.spec, policy.params.values, z);
    std::vector<double> action(out.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        action[i] = policy.action_low[i] +
                    (out[i] + 1.0) * 0.5 * (policy.action_high[i] - policy.action_low[i]);
    return action;
}

Policy random_policy(const NetSpec& spec, std::vector<double> action_low,
                     std::vector<double> action_high, std::uint64_t seed) {
    Rng rng(seed);
    Policy p;
    p.spec = spec;
    p.params = init_params(spec, rng);
    p.action_low = std::move(action_low);
    p.action_high = std::move(action_high);
    return p;
}

}  // namespace udrlpg
