#pragma once

#include "pcmas/mlp.hpp"

namespace pcmas::nn {

/// A generator network that maps a context vector to the flat parameter
/// vector of `target`. The generator itself is an MLP with relu hidden
/// layers and a linear output of width param_count(target).
struct HypernetSpec {
  int context_dim = 0;
  std::vector<int> hidden;
  MlpSpec target;

  MlpSpec generator_spec() const;

  bool operator==(const HypernetSpec&) const = default;
};

void validate(const HypernetSpec& spec);

/// Learnable parameters of the generator.
std::int64_t param_count(const HypernetSpec& spec);

/// Generates target-network parameters for one context.
Vector hyper_forward(const HypernetSpec& spec, const Vector& phi, const Vector& context);

/// Column-per-context generation; returns param_count(target) x batch.
Matrix hyper_forward_batch(const HypernetSpec& spec, const Vector& phi, const Matrix& contexts);

/// Pulls a loss gradient on the generated target parameters back onto the
/// generator parameters.
Vector hyper_backward(const HypernetSpec& spec, const Vector& phi, const Vector& context,
                      const Vector& target_param_grad);

/// Batched chain rule: column j of `target_param_grads` is the gradient for
/// the network generated from column j of `contexts`; the result is the sum
/// of the per-context generator gradients.
Vector hyper_backward_batch(const HypernetSpec& spec, const Vector& phi, const Matrix& contexts,
                            const Matrix& target_param_grads);

/// Initialization that makes generated networks start like plainly
/// initialized ones: hidden layers use the standard fan-in rule, the final
/// generating layer's weights get an extra 1/sqrt(fan_in) damping, and its
/// biases are drawn from the fan-in-scaled uniform range of whichever target
/// layer each output position parameterizes.
Vector init_params(const HypernetSpec& spec, std::uint64_t seed);

}  // namespace pcmas::nn
