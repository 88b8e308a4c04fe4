#pragma once

#include <cstdint>

#include "pcmas/types.hpp"

namespace pcmas::nn {

struct AdamState {
  Vector m;
  Vector v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t skipped = 0;  // updates rejected for non-finite gradients

  static AdamState zeros(Eigen::Index n);
};

/// One adaptive-moment update in place. A gradient with any non-finite entry
/// leaves the parameters untouched, bumps `skipped`, and returns false.
bool adam_step(Vector& params, const Vector& grad, AdamState& state, double learning_rate);

}  // namespace pcmas::nn
