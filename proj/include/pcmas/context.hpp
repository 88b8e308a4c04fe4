#pragma once

#include "pcmas/types.hpp"

namespace pcmas::training {

/// Upper-level design variables conditioning every generated network.
struct GameContext {
  int n_c = 0;
  double alpha = 0;

  bool operator==(const GameContext&) const = default;
};

/// Sampling bounds; segment training narrows these.
struct DesignSpace {
  int n_c_min = 0;
  int n_c_max = 0;
  double alpha_min = 0;
  double alpha_max = 1;

  bool contains(const GameContext& ctx) const {
    return ctx.n_c >= n_c_min && ctx.n_c <= n_c_max && ctx.alpha >= alpha_min &&
           ctx.alpha <= alpha_max;
  }
  bool operator==(const DesignSpace&) const = default;
};

/// n_c uniform over the integer range, alpha uniform over the real range.
GameContext sample_context(const DesignSpace& space, Rng& rng);

/// (n_c / N, alpha), the 2-vector every conditioned network consumes.
Vector normalized_context(const GameContext& ctx, int total_agents);

}  // namespace pcmas::traininging
