#pragma once

// Native episodic continuous-control environments: reset/step contract,
// undiscounted returns (gamma = 1), known return ranges.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "udrlpg/policy.hpp"

namespace udrlpg {

struct EnvContract {
    int obs_dim = 0;
    int action_dim = 0;
    std::vector<double> action_low;
    std::vector<double> action_high;
    int max_steps = 0;
    double return_min = 0.0;
    double return_max = 0.0;
};

struct EpisodeResult {
    double episode_return = 0.0;
    int steps = 0;
};

struct StepResult {
    std::vector<double> obs;
    double reward = 0.0;
    bool done = false;
};

class Env {
public:
    virtual ~Env() = default;
    virtual const EnvContract& contract() const = 0;
    virtual std::vector<double> reset(std::uint64_t seed) = 0;
    virtual StepResult step(std::span<const double> action) = 0;
};

// Cart with a hinged pole, Euler-integrated at dt = 0.02. Reward +1 per step,
// terminate on |angle| > 0.2 rad or |x| > 2.4, cap 1000 steps. Force in [-3, 3].
class CartPoleBalance final : public Env {
public:
    const EnvContract& contract() const override;
    std::vector<double> reset(std::uint64_t seed) override;
    StepResult step(std::span<const double> action) override;

private:
    std::vector<double> state_;  // x, x_dot, angle, angle_dot
    int steps_ = 0;
};

// Point mass on a line, accelerated toward a fixed target. Dense reward
// -|position - target| each step, 200 steps, walls at +-2.
class PointReacher final : public Env {
public:
    const EnvContract& contract() const override;
    std::vector<double> reset(std::uint64_t seed) override;
    StepResult step(std::span<const double> action) override;

private:
    double pos_ = 0.0;
    double vel_ = 0.0;
    int steps_ = 0;
};

// Single-step bandit with two symmetric optima at a = +-0.5 (reward 10) and
// reward 0 at a = 0: reward = 10 * max(0, 1 - 2 * ||a| - 0.5|).
class BimodalBandit final : public Env {
public:
    const EnvContract& contract() const override;
    std::vector<double> reset(std::uint64_t seed) override;
    StepResult step(std::span<const double> action) override;
};

std::unique_ptr<Env> make_env(const std::string& name);

// Runs reset + act/step until done. Updates norm online with every raw
// observation; appends raw observations to obs_log when given (used by the
// trainer to replay normalizer updates deterministically).
EpisodeResult rollout(Env& env, const Policy& policy, RunningNorm& norm, std::uint64_t seed,
                      std::vector<std::vector<double>>* obs_log = nullptr);

}  // namespace udrlpg
