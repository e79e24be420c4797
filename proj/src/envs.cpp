#include "udrlpg/envs.hpp"

#include <cmath>
#include <stdexcept>

#include "udrlpg/rng.hpp"

namespace udrlpg {

namespace {

void check_action(std::span<const double> action, int dim) {
    if (action.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("step: action dimension mismatch");
    for (double a : action)
        if (!std::isfinite(a)) throw std::runtime_error("step: non-finite action");
}

}  // namespace

// ---- cartpole-balance ----

namespace cartpole {
constexpr double kGravity = 9.8;
constexpr double kMassCart = 1.0;
constexpr double kMassPole = 0.1;
constexpr double kTotalMass = kMassCart + kMassPole;
constexpr double kHalfLength = 0.5;
constexpr double kPoleMassLength = kMassPole * kHalfLength;
constexpr double kDt = 0.02;
constexpr double kAngleLimit = 0.2;
constexpr double kXLimit = 2.4;
constexpr double kForceLimit = 3.0;
constexpr int kMaxSteps = 1000;
}  // namespace cartpole

const EnvContract& CartPoleBalance::contract() const {
    static const EnvContract c{
        .obs_dim = 4,
        .action_dim = 1,
        .action_low = {-cartpole::kForceLimit},
        .action_high = {cartpole::kForceLimit},
        .max_steps = cartpole::kMaxSteps,
        .return_min = 0.0,
        .return_max = 1000.0,
    };
    return c;
}

std::vector<double> CartPoleBalance::reset(std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> init(-0.05, 0.05);
    state_.resize(4);
    for (double& s : state_) s = init(rng);
    steps_ = 0;
    return state_;
}

StepResult CartPoleBalance::step(std::span<const double> action) {
    using namespace cartpole;
    check_action(action, 1);
    const double force = std::clamp(action[0], -kForceLimit, kForceLimit);

    double x = state_[0], x_dot = state_[1], angle = state_[2], angle_dot = state_[3];
    const double cos_a = std::cos(angle), sin_a = std::sin(angle);
    const double temp = (force + kPoleMassLength * angle_dot * angle_dot * sin_a) / kTotalMass;
    const double angle_acc = (kGravity * sin_a - cos_a * temp) /
                             (kHalfLength * (4.0 / 3.0 - kMassPole * cos_a * cos_a / kTotalMass));
    const double x_acc = temp - kPoleMassLength * angle_acc * cos_a / kTotalMass;

    x += kDt * x_dot;
    x_dot += kDt * x_acc;
    angle += kDt * angle_dot;
    angle_dot += kDt * angle_acc;
    state_ = {x, x_dot, angle, angle_dot};

    steps_ += 1;
    const bool fell = std::abs(angle) > kAngleLimit || std::abs(x) > kXLimit;
    const bool done = fell || steps_ >= kMaxSteps;
    return {.obs = state_, .reward = 1.0, .done = done};
}

// ---- point-reacher ----

namespace reacher {
constexpr double kTarget = 1.0;
constexpr double kWall = 2.0;
constexpr double kDt = 0.05;
constexpr int kMaxSteps = 200;
}  // namespace reacher

const EnvContract& PointReacher::contract() const {
    static const EnvContract c{
        .obs_dim = 2,
        .action_dim = 1,
        .action_low = {-1.0},
        .action_high = {1.0},
        .max_steps = reacher::kMaxSteps,
        .return_min = -600.0,
        .return_max = 0.0,
    };
    return c;
}

std::vector<double> PointReacher::reset(std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> init(-0.5, 0.5);
    pos_ = init(rng);
    vel_ = 0.0;
    steps_ = 0;
    return {pos_, vel_};
}

StepResult PointReacher::step(std::span<const double> action) {
    using namespace reacher;
    check_action(action, 1);
    const double acc = std::clamp(action[0], -1.0, 1.0);
    vel_ += kDt * acc;
    pos_ += kDt * vel_;
    if (pos_ > kWall) { pos_ = kWall; vel_ = 0.0; }
    if (pos_ < -kWall) { pos_ = -kWall; vel_ = 0.0; }
    steps_ += 1;
    const double reward = -std::abs(pos_ - kTarget);
    return {.obs = {pos_, vel_}, .reward = reward, .done = steps_ >= kMaxSteps};
}

// ---- bimodal-bandit ----

const EnvContract& BimodalBandit::contract() const {
    static const EnvContract c{
        .obs_dim = 1,
        .action_dim = 1,
        .action_low = {-1.0},
        .action_high = {1.0},
        .max_steps = 1,
        .return_min = 0.0,
        .return_max = 10.0,
    };
    return c;
}

std::vector<double> BimodalBandit::reset(std::uint64_t) { return {1.0}; }

StepResult BimodalBandit::step(std::span<const double> action) {
    check_action(action, 1);
    const double a = std::clamp(action[0], -1.0, 1.0);
    const double reward = 10.0 * std::max(0.0, 1.0 - 2.0 * std::abs(std::abs(a) - 0.5));
    return {.obs = {1.0}, .reward = reward, .done = true};
}

std::unique_ptr<Env> make_env(const std::string& name) {
    if (name == "cartpole-balance") return std::make_unique<CartPoleBalance>();
    if (name == "point-reacher") return std::make_unique<PointReacher>();
    if (name == "bimodal-bandit") return std::make_unique<BimodalBandit>();
    throw std::invalid_argument("unknown environment: " + name);
}

EpisodeResult rollout(Env& env, const Policy& policy, RunningNorm& norm, std::uint64_t seed,
                      std::vector<std::vector<double>>* obs_log) {
    std::vector<double> obs = env.reset(seed);
    EpisodeResult result;
    while (true) {
        norm.update(obs);
        if (obs_log) obs_log->push_back(obs);
        const std::vector<double> action = act(policy, obs, norm);
        StepResult sr = env.step(action);
        result.episode_return += sr.reward;
        result.steps += 1;
        if (sr.done) break;
        obs = std::move(sr.obs);
    }
    return result;
}

}  // namespace udrlpg
