#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcmas/types.hpp"

namespace pcmas::nn {

enum class Activation { kRelu, kTanh };
enum class OutputHead { kLinear, kSoftmax };

/// Dense feed-forward network description. `layer_sizes` runs from the input
/// dimension through every hidden width to the output dimension, so a valid
/// spec has at least two entries.
struct MlpSpec {
  std::vector<int> layer_sizes;
  Activation hidden_activation = Activation::kRelu;
  OutputHead output_head = OutputHead::kLinear;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  /// Number of affine layers.
  int depth() const { return static_cast<int>(layer_sizes.size()) - 1; }

  bool operator==(const MlpSpec&) const = default;
};

/// Convenience constructor: [input, hidden..., output].
MlpSpec make_mlp_spec(int input_dim, const std::vector<int>& hidden, int output_dim,
                      OutputHead head = OutputHead::kLinear,
                      Activation activation = Activation::kRelu);

/// Throws std::invalid_argument if the spec violates its invariants.
void validate(const MlpSpec& spec);

/// Total learnable parameters: sum over consecutive layer pairs of
/// n_in*n_out + n_out. Parameters are stored flat, layer by layer, each
/// layer as its weight matrix (column-major, n_out x n_in) followed by its
/// bias vector.
std::int64_t param_count(const MlpSpec& spec);

/// Flat offset of layer `layer`'s weight block; bias follows the weights.
std::int64_t layer_offset(const MlpSpec& spec, int layer);

Vector softmax(const Vector& logits);

/// Single-sample evaluation.
Vector forward(const MlpSpec& spec, const Vector& params, const Vector& input);

/// Column-per-sample evaluation; `inputs` is input_dim x batch.
Matrix forward_batch(const MlpSpec& spec, const Vector& params, const Matrix& inputs);

struct BackwardResult {
  Vector param_grad;
  Vector input_grad;
};

/// Exact reverse-mode gradients for a scalar loss whose gradient w.r.t. the
/// network output is `output_grad`.
BackwardResult backward(const MlpSpec& spec, const Vector& params, const Vector& input,
                        const Vector& output_grad);

struct BatchBackwardResult {
  Vector param_grad;   // summed over the batch
  Matrix input_grads;  // input_dim x batch
};

BatchBackwardResult backward_batch(const MlpSpec& spec, const Vector& params,
                                   const Matrix& inputs, const Matrix& output_grads);

/// Deterministic fan-in-scaled uniform initialization: weights and biases of
/// each layer drawn from U(-1/sqrt(n_in), 1/sqrt(n_in)).
Vector init_params(const MlpSpec& spec, std::uint64_t seed);

}  // namespace pcmas::nn
