#pragma once

#include <functional>

#include "pcmas/types.hpp"

namespace pcmas::testutil {

/// Central finite differences of a scalar function over every coordinate.
inline Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                               double step = 1e-5) {
  Vector grad(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double hi = f(probe);
    probe[i] = x[i] - step;
    const double lo = f(probe);
    probe[i] = x[i];
    grad[i] = (hi - lo) / (2.0 * step);
  }
  return grad;
}

/// Relative error between analytic and numeric gradients, guarded for the
/// all-zero case.
inline double gradient_rel_error(const Vector& analytic, const Vector& numeric) {
  const double denom = std::max(1e-12, std::max(analytic.norm(), numeric.norm()));
  return (analytic - numeric).norm() / denom;
}

}  // namespace pcmas::testutil
