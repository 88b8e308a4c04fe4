#include "pcmas/context.hpp"

#include <stdexcept>

namespace pcmas::training {

GameContext sample_context(const DesignSpace& space, Rng& rng) {
  if (space.n_c_min > space.n_c_max || space.alpha_min > space.alpha_max) {
    throw std::invalid_argument("design space bounds are inverted");
  }
  GameContext ctx;
  std::uniform_int_distribution<int> n_c(space.n_c_min, space.n_c_max);
  ctx.n_c = n_c(rng);
  if (space.alpha_min == space.alpha_max) {
    ctx.alpha = space.alpha_min;
  } else {
    std::uniform_real_distribution<double> alpha(space.alpha_min, space.alpha_max);
    ctx.alpha = alpha(rng);
  }
  return ctx;
}

Vector normalized_context(const GameContext& ctx, int total_agents) {
  Vector v(2);
  v << (total_agents > 0 ? static_cast<double>(ctx.n_c) / total_agents : 0.0), ctx.alpha;
  return v;
}

}  // namespace pcmas::traininging
