#include "pcmas/mlp.hpp"

#include <cmath>

namespace pcmas::nn {

namespace {

using ConstMatMap = Eigen::Map<const Matrix>;
using ConstVecMap = Eigen::Map<const Vector>;
using MatMap = Eigen::Map<Matrix>;
using VecMap = Eigen::Map<Vector>;

void apply_activation(Matrix& a, Activation act) {
  if (act == Activation::kRelu) {
    a = a.cwiseMax(0.0);
  } else {
    a = a.array().tanh().matrix();
  }
}

// Derivative through the hidden nonlinearity, given post-activation values.
void apply_activation_grad(Matrix& grad, const Matrix& post, Activation act) {
  if (act == Activation::kRelu) {
    grad = (post.array() > 0.0).select(grad, 0.0);
  } else {
    grad.array() *= 1.0 - post.array().square();
  }
}

Matrix softmax_columns(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    Vector shifted = logits.col(j).array() - logits.col(j).maxCoeff();
    Vector e = shifted.array().exp();
    out.col(j) = e / e.sum();
  }
  return out;
}

}  // namespace

MlpSpec make_mlp_spec(int input_dim, const std::vector<int>& hidden, int output_dim,
                      OutputHead head, Activation activation) {
  MlpSpec spec;
  spec.layer_sizes.reserve(hidden.size() + 2);
  spec.layer_sizes.push_back(input_dim);
  spec.layer_sizes.insert(spec.layer_sizes.end(), hidden.begin(), hidden.end());
  spec.layer_sizes.push_back(output_dim);
  spec.hidden_activation = activation;
  spec.output_head = head;
  validate(spec);
  return spec;
}

void validate(const MlpSpec& spec) {
  if (spec.layer_sizes.size() < 2) {
    throw std::invalid_argument("MlpSpec needs at least 2 layers, got " +
                                std::to_string(spec.layer_sizes.size()));
  }
  for (int s : spec.layer_sizes) {
    if (s < 1) {
      throw std::invalid_argument("MlpSpec layer sizes must be >= 1, got " + std::to_string(s));
    }
  }
}

std::int64_t param_count(const MlpSpec& spec) {
  validate(spec);
  std::int64_t total = 0;
  for (int l = 0; l + 1 < static_cast<int>(spec.layer_sizes.size()); ++l) {
    const std::int64_t n_in = spec.layer_sizes[l];
    const std::int64_t n_out = spec.layer_sizes[l + 1];
    total += n_in * n_out + n_out;
  }
  return total;
}

std::int64_t layer_offset(const MlpSpec& spec, int layer) {
  std::int64_t off = 0;
  for (int l = 0; l < layer; ++l) {
    const std::int64_t n_in = spec.layer_sizes[l];
    const std::int64_t n_out = spec.layer_sizes[l + 1];
    off += n_in * n_out + n_out;
  }
  return off;
}

Vector softmax(const Vector& logits) {
  Vector shifted = logits.array() - logits.maxCoeff();
  Vector e = shifted.array().exp();
  return e / e.sum();
}

Matrix forward_batch(const MlpSpec& spec, const Vector& params, const Matrix& inputs) {
  validate(spec);
  if (params.size() != param_count(spec)) {
    throw std::invalid_argument("param vector has length " + std::to_string(params.size()) +
                                ", spec expects " + std::to_string(param_count(spec)));
  }
  if (inputs.rows() != spec.input_dim()) {
    throw std::invalid_argument("input has dim " + std::to_string(inputs.rows()) +
                                ", spec expects " + std::to_string(spec.input_dim()));
  }
  Matrix a = inputs;
  std::int64_t off = 0;
  const int depth = spec.depth();
  for (int l = 0; l < depth; ++l) {
    const int n_in = spec.layer_sizes[l];
    const int n_out = spec.layer_sizes[l + 1];
    ConstMatMap w(params.data() + off, n_out, n_in);
    ConstVecMap b(params.data() + off + static_cast<std::int64_t>(n_in) * n_out, n_out);
    off += static_cast<std::int64_t>(n_in) * n_out + n_out;
    a = (w * a).colwise() + b;
    if (l + 1 < depth) apply_activation(a, spec.hidden_activation);
  }
  if (spec.output_head == OutputHead::kSoftmax) a = softmax_columns(a);
  return a;
}

Vector forward(const MlpSpec& spec, const Vector& params, const Vector& input) {
  return forward_batch(spec, params, input).col(0);
}

BatchBackwardResult backward_batch(const MlpSpec& spec, const Vector& params,
                                   const Matrix& inputs, const Matrix& output_grads) {
  validate(spec);
  if (params.size() != param_count(spec)) {
    throw std::invalid_argument("param vector has length " + std::to_string(params.size()) +
                                ", spec expects " + std::to_string(param_count(spec)));
  }
  if (inputs.rows() != spec.input_dim() || output_grads.rows() != spec.output_dim() ||
      inputs.cols() != output_grads.cols()) {
    throw std::invalid_argument("backward: inconsistent input/output gradient shapes");
  }

  const int depth = spec.depth();
  // Forward pass keeping post-activation values of every layer.
  std::vector<Matrix> acts(depth + 1);
  acts[0] = inputs;
  std::int64_t off = 0;
  for (int l = 0; l < depth; ++l) {
    const int n_in = spec.layer_sizes[l];
    const int n_out = spec.layer_sizes[l + 1];
    ConstMatMap w(params.data() + off, n_out, n_in);
    ConstVecMap b(params.data() + off + static_cast<std::int64_t>(n_in) * n_out, n_out);
    off += static_cast<std::int64_t>(n_in) * n_out + n_out;
    acts[l + 1] = (w * acts[l]).colwise() + b;
    if (l + 1 < depth) apply_activation(acts[l + 1], spec.hidden_activation);
  }

  Matrix delta = output_grads;  // gradient w.r.t. pre-head output
  if (spec.output_head == OutputHead::kSoftmax) {
    Matrix y = softmax_columns(acts[depth]);
    // dL/dlogits = y .* (g - <g, y>)
    for (Eigen::Index j = 0; j < delta.cols(); ++j) {
      const double dot = delta.col(j).dot(y.col(j));
      delta.col(j) = y.col(j).cwiseProduct((delta.col(j).array() - dot).matrix());
    }
  }

  BatchBackwardResult result;
  result.param_grad = Vector::Zero(params.size());
  for (int l = depth - 1; l >= 0; --l) {
    const int n_in = spec.layer_sizes[l];
    const int n_out = spec.layer_sizes[l + 1];
    const std::int64_t woff = layer_offset(spec, l);
    ConstMatMap w(params.data() + woff, n_out, n_in);
    MatMap w_grad(result.param_grad.data() + woff, n_out, n_in);
    VecMap b_grad(result.param_grad.data() + woff + static_cast<std::int64_t>(n_in) * n_out,
                  n_out);
    w_grad = delta * acts[l].transpose();
    b_grad = delta.rowwise().sum();
    if (l > 0) {
      delta = (w.transpose() * delta).eval();
      apply_activation_grad(delta, acts[l], spec.hidden_activation);
    } else {
      result.input_grads = w.transpose() * delta;
    }
  }
  return result;
}

BackwardResult backward(const MlpSpec& spec, const Vector& params, const Vector& input,
                        const Vector& output_grad) {
  BatchBackwardResult batch = backward_batch(spec, params, input, output_grad);
  return {std::move(batch.param_grad), batch.input_grads.col(0)};
}

Vector init_params(const MlpSpec& spec, std::uint64_t seed) {
  validate(spec);
  Vector params(param_count(spec));
  Rng rng(seed);
  std::int64_t off = 0;
  for (int l = 0; l < spec.depth(); ++l) {
    const std::int64_t n_in = spec.layer_sizes[l];
    const std::int64_t n_out = spec.layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(n_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::int64_t i = 0; i < n_in * n_out + n_out; ++i) params[off + i] = dist(rng);
    off += n_in * n_out + n_out;
  }
  return params;
}

}  // namespace pcmas::nn
