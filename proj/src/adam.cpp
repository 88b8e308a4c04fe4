#include "pcmas/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace pcmas::nn {

AdamState AdamState::zeros(Eigen::Index n) {
  AdamState state;
  state.m = Vector::Zero(n);
  state.v = Vector::Zero(n);
  return state;
}

bool adam_step(Vector& params, const Vector& grad, AdamState& state, double learning_rate) {
  if (params.size() != grad.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: size mismatch between params, grad and state");
  }
  if (!grad.allFinite()) {
    ++state.skipped;
    return false;
  }
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= learning_rate * (state.m.array() / bc1) /
                    ((state.v.array() / bc2).sqrt() + state.eps);
  return true;
}

}  // namespace pcmas::nn
