#include "udrlpg/generator.hpp"

#include <cmath>
#include <stdexcept>

#include "udrlpg/rng.hpp"

namespace udrlpg {

Generator make_generator(std::size_t policy_param_count, CommandNorm command_norm,
                         double sigma, std::uint64_t seed, double adam_alpha,
                         std::vector<int> hidden_sizes) {
    Generator gen;
    gen.spec.layer_sizes = {1};
    for (int h : hidden_sizes) gen.spec.layer_sizes.push_back(h);
    gen.spec.layer_sizes.push_back(static_cast<int>(policy_param_count));
    gen.spec.hidden_activation = Activation::tanh;
    gen.spec.output_activation = Activation::identity;
    gen.spec.validate();

    Rng rng(seed);
    gen.rho = init_params(gen.spec, rng, /*output_weight_scale=*/0.01);
    gen.optimizer = AdamState(gen.rho.values.size(), adam_alpha);
    gen.command_norm = command_norm;
    gen.sigma = sigma;
    return gen;
}

std::vector<double> generate(const Generator& gen, double command) {
    if (!std::isfinite(command))
        throw std::invalid_argument("generate: non-finite command");
    const double z = gen.command_norm.normalize(command);
    std::vector<double> theta = forward(gen.spec, gen.rho.values, std::span(&z, 1));
    for (double v : theta)
        if (!std::isfinite(v))
            throw std::runtime_error("generate: non-finite output for command " +
                                     std::to_string(command));
    return theta;
}

std::vector<double> perturb(std::span<const double> theta, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("perturb: sigma must be >= 0");
    std::vector<double> out(theta.begin(), theta.end());
    if (sigma == 0.0) return out;
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : out) v += noise(rng);
    return out;
}

double batch_loss(const Generator& gen,
                  const std::vector<std::pair<double, std::vector<double>>>& batch,
                  std::vector<double>* rho_grad) {
    if (batch.empty()) throw std::invalid_argument("batch_loss: empty batch");
    if (rho_grad) rho_grad->assign(gen.rho.values.size(), 0.0);

    const double inv_b = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    for (const auto& [command, theta_star] : batch) {
        if (theta_star.size() != static_cast<std::size_t>(gen.spec.output_size()))
            throw std::invalid_argument("batch_loss: target length mismatch");
        const double z = gen.command_norm.normalize(command);
        ForwardCache cache;
        const std::vector<double> pred =
            forward(gen.spec, gen.rho.values, std::span(&z, 1), &cache);
        loss += mse(pred, theta_star) * inv_b;
        if (rho_grad) {
            std::vector<double> up = mse_grad(pred, theta_star);
            for (double& g : up) g *= inv_b;
            const BackwardResult back = backward(gen.rho.values, cache, up);
            for (std::size_t i = 0; i < rho_grad->size(); ++i)
                (*rho_grad)[i] += back.param_grad[i];
        }
    }
    return loss;
}

double train_batch(Generator& gen,
                   const std::vector<std::pair<double, std::vector<double>>>& batch) {
    std::vector<double> grad;
    const double loss = batch_loss(gen, batch, &grad);
    if (!std::isfinite(loss))
        throw std::runtime_error("train_batch: non-finite loss, step skipped");
    adam_step(gen.optimizer, gen.rho.values, grad);
    return loss;
}

}  // namespace udrlpg
