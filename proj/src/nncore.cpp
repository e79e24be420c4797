#include "udrlpg/nncore.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace udrlpg {

namespace {

double apply_act(Activation a, double x) {
    switch (a) {
        case Activation::identity: return x;
        case Activation::tanh: return std::tanh(x);
        case Activation::relu: return x > 0.0 ? x : 0.0;
    }
    throw std::logic_error("unknown activation");
}

// derivative expressed through the post-activation value where possible
double act_deriv(Activation a, double pre, double post) {
    switch (a) {
        case Activation::identity: return 1.0;
        case Activation::tanh: return 1.0 - post * post;
        case Activation::relu: return pre > 0.0 ? 1.0 : 0.0;
    }
    throw std::logic_error("unknown activation");
}

}  // namespace

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::tanh: return "tanh";
        case Activation::relu: return "relu";
    }
    throw std::logic_error("unknown activation");
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::identity;
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    throw std::invalid_argument("unknown activation name: " + name);
}

void NetSpec::validate() const {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("NetSpec needs at least input and output layers");
    for (int n : layer_sizes)
        if (n < 1) throw std::invalid_argument("NetSpec layer sizes must be >= 1");
}

std::size_t param_count(const NetSpec& spec) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
        const std::size_t in = static_cast<std::size_t>(spec.layer_sizes[l]);
        const std::size_t out = static_cast<std::size_t>(spec.layer_sizes[l + 1]);
        n += in * out + out;
    }
    return n;
}

void FlatParams::validate() const {
    spec.validate();
    if (values.size() != param_count(spec))
        throw std::invalid_argument("FlatParams length does not match spec");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("FlatParams contains non-finite entry");
}

std::vector<double> forward(const NetSpec& spec, std::span<const double> params,
                            std::span<const double> input, ForwardCache* cache) {
    if (params.size() != param_count(spec))
        throw std::invalid_argument("forward: params length mismatch");
    if (input.size() != static_cast<std::size_t>(spec.input_size()))
        throw std::invalid_argument("forward: input length mismatch");

    if (cache) {
        cache->spec = spec;
        cache->post.clear();
        cache->pre.clear();
        cache->post.emplace_back(input.begin(), input.end());
    }

    std::vector<double> cur(input.begin(), input.end());
    std::size_t off = 0;
    const std::size_t n_layers = spec.layer_sizes.size() - 1;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t in = static_cast<std::size_t>(spec.layer_sizes[l]);
        const std::size_t out = static_cast<std::size_t>(spec.layer_sizes[l + 1]);
        const Activation act =
            (l + 1 == n_layers) ? spec.output_activation : spec.hidden_activation;

        std::vector<double> pre(out);
        const double* w = params.data() + off;
        const double* b = params.data() + off + in * out;
        for (std::size_t j = 0; j < out; ++j) {
            double s = b[j];
            const double* wj = w + j * in;
            for (std::size_t i = 0; i < in; ++i) s += wj[i] * cur[i];
            pre[j] = s;
        }
        std::vector<double> post(out);
        for (std::size_t j = 0; j < out; ++j) post[j] = apply_act(act, pre[j]);

        if (cache) {
            cache->pre.push_back(pre);
            cache->post.push_back(post);
        }
        cur = std::move(post);
        off += in * out + out;
    }
    return cur;
}

BackwardResult backward(std::span<const double> params, const ForwardCache& cache,
                        std::span<const double> upstream_grad) {
    const NetSpec& spec = cache.spec;
    const std::size_t n_layers = spec.layer_sizes.size() - 1;
    if (cache.post.size() != n_layers + 1 || cache.pre.size() != n_layers)
        throw std::invalid_argument("backward: cache does not match a completed forward pass");
    if (params.size() != param_count(spec))
        throw std::invalid_argument("backward: params length mismatch");
    if (upstream_grad.size() != static_cast<std::size_t>(spec.output_size()))
        throw std::invalid_argument("backward: upstream gradient length mismatch");

    BackwardResult res;
    res.param_grad.assign(params.size(), 0.0);

    // layer offsets into the flat vector
    std::vector<std::size_t> offsets(n_layers);
    std::size_t off = 0;
    for (std::size_t l = 0; l < n_layers; ++l) {
        offsets[l] = off;
        off += static_cast<std::size_t>(spec.layer_sizes[l]) * spec.layer_sizes[l + 1] +
               spec.layer_sizes[l + 1];
    }

    std::vector<double> delta(upstream_grad.begin(), upstream_grad.end());
    for (std::size_t l = n_layers; l-- > 0;) {
        const std::size_t in = static_cast<std::size_t>(spec.layer_sizes[l]);
        const std::size_t out = static_cast<std::size_t>(spec.layer_sizes[l + 1]);
        const Activation act =
            (l + 1 == n_layers) ? spec.output_activation : spec.hidden_activation;

        // through the activation
        for (std::size_t j = 0; j < out; ++j)
            delta[j] *= act_deriv(act, cache.pre[l][j], cache.post[l + 1][j]);

        double* gw = res.param_grad.data() + offsets[l];
        double* gb = res.param_grad.data() + offsets[l] + in * out;
        const double* w = params.data() + offsets[l];
        const std::vector<double>& x = cache.post[l];

        std::vector<double> next_delta(in, 0.0);
        for (std::size_t j = 0; j < out; ++j) {
            const double dj = delta[j];
            gb[j] += dj;
            double* gwj = gw + j * in;
            const double* wj = w + j * in;
            for (std::size_t i = 0; i < in; ++i) {
                gwj[i] += dj * x[i];
                next_delta[i] += dj * wj[i];
            }
        }
        delta = std::move(next_delta);
    }
    res.input_grad = std::move(delta);
    return res;
}

double mse(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size())
        throw std::invalid_argument("mse: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        s += d * d;
    }
    return s / static_cast<double>(pred.size());
}

std::vector<double> mse_grad(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size())
        throw std::invalid_argument("mse_grad: length mismatch");
    std::vector<double> g(pred.size());
    const double scale = 2.0 / static_cast<double>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) g[i] = scale * (pred[i] - target[i]);
    return g;
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad) {
    if (params.size() != grad.size() || state.m.size() != params.size() ||
        state.v.size() != params.size())
        throw std::invalid_argument("adam_step: length mismatch");
    for (double g : grad)
        if (!std::isfinite(g))
            throw std::runtime_error("adam_step: non-finite gradient entry, update aborted");

    state.step += 1;
    const double b1t = std::pow(state.beta1, static_cast<double>(state.step));
    const double b2t = std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / (1.0 - b1t);
        const double vhat = state.v[i] / (1.0 - b2t);
        params[i] -= state.alpha * mhat / (std::sqrt(vhat) + state.eps);
    }
}

FlatParams init_params(const NetSpec& spec, Rng& rng, double output_weight_scale) {
    spec.validate();
    FlatParams p;
    p.spec = spec;
    p.values.resize(param_count(spec), 0.0);

    const std::size_t n_layers = spec.layer_sizes.size() - 1;
    std::size_t off = 0;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t in = static_cast<std::size_t>(spec.layer_sizes[l]);
        const std::size_t out = static_cast<std::size_t>(spec.layer_sizes[l + 1]);
        double bound = std::sqrt(6.0 / static_cast<double>(in + out));
        if (l + 1 == n_layers) bound *= output_weight_scale;
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t k = 0; k < in * out; ++k) p.values[off + k] = dist(rng);
        // biases stay 0
        off += in * out + out;
    }
    return p;
}

std::string params_to_json(const FlatParams& p) {
    nlohmann::json j;
    j["layer_sizes"] = p.spec.layer_sizes;
    j["hidden_activation"] = activation_name(p.spec.hidden_activation);
    j["output_activation"] = activation_name(p.spec.output_activation);
    j["values"] = p.values;
    return j.dump();
}

FlatParams params_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    FlatParams p;
    p.spec.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    p.spec.hidden_activation = activation_from_name(j.at("hidden_activation").get<std::string>());
    p.spec.output_activation = activation_from_name(j.at("output_activation").get<std::string>());
    p.values = j.at("values").get<std::vector<double>>();
    p.validate();
    return p;
}

}  // namespace udrlpg
