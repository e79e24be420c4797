#pragma once

// Minimal dense feed-forward engine: forward, exact backprop, MSE, Adam.
// Everything is double precision and fully deterministic given a seed.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "udrlpg/rng.hpp"

namespace udrlpg {

enum class Activation { identity, tanh, relu };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct NetSpec {
    std::vector<int> layer_sizes;  // input, hidden..., output
    Activation hidden_activation = Activation::tanh;
    Activation output_activation = Activation::identity;

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    void validate() const;  // throws on malformed specs
    bool operator==(const NetSpec&) const = default;
};

// Total number of weights + biases. Pure function of layer_sizes.
std::size_t param_count(const NetSpec& spec);

// Flat parameter vector in canonical order: for each layer, weight matrix
// row-major with one row per output neuron, then the bias vector.
struct FlatParams {
    NetSpec spec;
    std::vector<double> values;

    void validate() const;  // length and finiteness
};

// Per-layer activations kept by forward() for the backward pass.
struct ForwardCache {
    NetSpec spec;
    std::vector<std::vector<double>> post;  // post[0] = input, post[L] = output
    std::vector<std::vector<double>> pre;   // pre-activation per layer
};

std::vector<double> forward(const NetSpec& spec, std::span<const double> params,
                            std::span<const double> input, ForwardCache* cache = nullptr);

struct BackwardResult {
    std::vector<double> param_grad;  // FlatParams-shaped
    std::vector<double> input_grad;
};

BackwardResult backward(std::span<const double> params, const ForwardCache& cache,
                        std::span<const double> upstream_grad);

double mse(std::span<const double> pred, std::span<const double> target);
// d(mse)/d(pred) = 2 (pred - target) / n
std::vector<double> mse_grad(std::span<const double> pred, std::span<const double> target);

struct AdamState {
    std::size_t step = 0;
    std::vector<double> m, v;
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(std::size_t n = 0, double alpha_ = 1e-3)
        : m(n, 0.0), v(n, 0.0), alpha(alpha_) {}
};

// Standard bias-corrected Adam update, in place. Throws on non-finite gradients.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad);

// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.
// output_weight_scale shrinks the last layer's weights (generator init uses 0.01).
FlatParams init_params(const NetSpec& spec, Rng& rng, double output_weight_scale = 1.0);

// Checkpoint fragment (JSON text) for one spec + flat values record.
std::string params_to_json(const FlatParams& p);
FlatParams params_from_json(const std::string& text);

}  // namespace udrlpg
