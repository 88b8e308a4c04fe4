#include "pcmas/hypernet.hpp"

#include <cmath>

namespace pcmas::nn {

MlpSpec HypernetSpec::generator_spec() const {
  MlpSpec gen;
  gen.layer_sizes.push_back(context_dim);
  gen.layer_sizes.insert(gen.layer_sizes.end(), hidden.begin(), hidden.end());
  gen.layer_sizes.push_back(static_cast<int>(nn::param_count(target)));
  gen.hidden_activation = Activation::kRelu;
  gen.output_head = OutputHead::kLinear;
  return gen;
}

void validate(const HypernetSpec& spec) {
  if (spec.context_dim < 1) throw std::invalid_argument("hypernet context_dim must be >= 1");
  validate(spec.target);
  validate(spec.generator_spec());
}

std::int64_t param_count(const HypernetSpec& spec) { return param_count(spec.generator_spec()); }

Vector hyper_forward(const HypernetSpec& spec, const Vector& phi, const Vector& context) {
  return forward(spec.generator_spec(), phi, context);
}

Matrix hyper_forward_batch(const HypernetSpec& spec, const Vector& phi, const Matrix& contexts) {
  return forward_batch(spec.generator_spec(), phi, contexts);
}

Vector hyper_backward(const HypernetSpec& spec, const Vector& phi, const Vector& context,
                      const Vector& target_param_grad) {
  return backward(spec.generator_spec(), phi, context, target_param_grad).param_grad;
}

Vector hyper_backward_batch(const HypernetSpec& spec, const Vector& phi, const Matrix& contexts,
                            const Matrix& target_param_grads) {
  return backward_batch(spec.generator_spec(), phi, contexts, target_param_grads).param_grad;
}

Vector init_params(const HypernetSpec& spec, std::uint64_t seed) {
  validate(spec);
  const MlpSpec gen = spec.generator_spec();
  Vector phi(param_count(gen));
  Rng rng(seed);

  // Hidden layers: plain fan-in rule.
  std::int64_t off = 0;
  const int depth = gen.depth();
  for (int l = 0; l + 1 < depth; ++l) {
    const std::int64_t n_in = gen.layer_sizes[l];
    const std::int64_t n_out = gen.layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(n_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::int64_t i = 0; i < n_in * n_out + n_out; ++i) phi[off + i] = dist(rng);
    off += n_in * n_out + n_out;
  }

  // Final generating layer. Weights are damped by an extra 1/sqrt(fan_in)
  // so the context-dependent part starts as a small perturbation.
  const std::int64_t n_in = gen.layer_sizes[depth - 1];
  const std::int64_t n_out = gen.layer_sizes[depth];
  const double w_bound = 1.0 / static_cast<double>(n_in);
  std::uniform_real_distribution<double> w_dist(-w_bound, w_bound);
  for (std::int64_t i = 0; i < n_in * n_out; ++i) phi[off + i] = w_dist(rng);
  off += n_in * n_out;

  // Biases carry the per-target-layer uniform ranges, so the generated
  // network starts in the same distribution as a plainly initialized one.
  std::int64_t pos = 0;
  for (int tl = 0; tl < spec.target.depth(); ++tl) {
    const std::int64_t t_in = spec.target.layer_sizes[tl];
    const std::int64_t t_out = spec.target.layer_sizes[tl + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(t_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::int64_t i = 0; i < t_in * t_out + t_out; ++i) phi[off + pos + i] = dist(rng);
    pos += t_in * t_out + t_out;
  }
  return phi;
}

}  // namespace pcmas::nn
