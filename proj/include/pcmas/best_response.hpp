#pragma once

#include "pcmas/train.hpp"

namespace pcmas::eval {

using training::GameContext;
using training::TrainedBundle;

/// Best-response training setup. The defaults are the full-scale values;
/// desk-scale runs shrink the budget and enable the plateau stop.
struct BrConfig {
  env::AgentType representative_type = env::AgentType::kUncontrollable;
  std::int64_t episodes = 60000;
  std::vector<int> actor_hidden{64, 32, 16};
  std::vector<int> critic_hidden{128, 64, 32};
  double lr_actor = 4e-5;
  double lr_critic = 3e-4;
  double gamma = 1.0;
  double entropy_weight = 0.01;
  int update_interval = 10;
  int updates_per_phase = 20;
  int batch_size = 256;
  std::size_t replay_capacity = 100000;
  int critic_target_refresh = 200;
  /// Early stop: after every window, stop when the window's mean episode
  /// reward gained less than `plateau_tol` over the previous window.
  /// 0 disables the check.
  std::int64_t plateau_window = 0;
  double plateau_tol = 0.01;
};

/// Representative agent of the type: the first driver id of that type.
int representative_agent(const GameContext& ctx, int total_agents, env::AgentType type);

struct BrPolicy {
  mfac::ActorCritic nets;
  std::int64_t episodes_trained = 0;
  std::vector<double> episode_rewards;  // deviator training signal per episode
};

/// Trains a fresh actor-critic for one representative agent while every
/// other agent follows the bundle's generated policies (which stay frozen;
/// the bundle is read-only here). Controllable representatives train on the
/// synthetic reward, uncontrollable ones on fares.
BrPolicy train_best_response(const TrainedBundle& bundle, const data::DemandModel& demand,
                             const GameContext& ctx, const BrConfig& config, std::uint64_t seed);

}  // namespace pcmas::eval
