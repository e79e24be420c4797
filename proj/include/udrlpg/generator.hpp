#pragma once

// The policy generator G_rho: a dense hypernetwork decoding a normalized
// scalar return command into a full policy parameter vector, with Gaussian
// parameter-space perturbation and MSE hindsight training.

#include <span>
#include <utility>
#include <vector>

#include "udrlpg/nncore.hpp"

namespace udrlpg {

// Fixed invertible affine map from the environment's return range to [-1, 1].
struct CommandNorm {
    double r_min = 0.0;
    double r_max = 1.0;

    double normalize(double c) const { return 2.0 * (c - r_min) / (r_max - r_min) - 1.0; }
    double denormalize(double z) const { return r_min + (z + 1.0) * 0.5 * (r_max - r_min); }
};

struct Generator {
    NetSpec spec;     // input size 1, output size = param_count(policy spec)
    FlatParams rho;   // hypernetwork parameters
    AdamState optimizer;
    CommandNorm command_norm;
    double sigma = 0.02;
};

// Hidden sizes default to 64-64 tanh, identity output, output weights scaled
// by 0.01 so early generated policies sit near the bias vector.
Generator make_generator(std::size_t policy_param_count, CommandNorm command_norm,
                         double sigma, std::uint64_t seed, double adam_alpha = 1e-3,
                         std::vector<int> hidden_sizes = {64, 64});

// Deterministic decode of one command into a policy parameter vector.
// Commands outside the known return range are allowed (extrapolation probes).
std::vector<double> generate(const Generator& gen, double command);

// theta + N(0, sigma^2 I), seeded.
std::vector<double> perturb(std::span<const double> theta, double sigma, std::uint64_t seed);

// One Adam step on rho against the batch mean of per-pair MSE between
// G_rho(c) and theta*. Returns the pre-step loss. Non-finite loss skips the
// step and throws.
double train_batch(Generator& gen,
                   const std::vector<std::pair<double, std::vector<double>>>& batch);

// Batch loss and its gradient w.r.t. rho without updating (finite-difference
// checks and diagnostics).
double batch_loss(const Generator& gen,
                  const std::vector<std::pair<double, std::vector<double>>>& batch,
                  std::vector<double>* rho_grad = nullptr);

}  // namespace udrlpg
