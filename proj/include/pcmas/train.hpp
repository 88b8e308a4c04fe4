#pragma once

#include <functional>
#include <memory>
#include <string>

#include "pcmas/demand.hpp"
#include "pcmas/policy_system.hpp"
#include "pcmas/rollout.hpp"

namespace pcmas::training {

/// Fixed facts about the game being trained on.
struct TrainSetup {
  data::GridSpec grid;
  int total_agents = 100;
  int horizon = 21;
  double episode_hours = 4.0;
  /// Synthetic fare credited to controllable matches; 0 means "use the
  /// demand model's mean fare".
  double synthetic_fare = 0.0;
  /// Rate used for the PR column of training history rows.
  double history_hourly_rate = 0.0;

  bool operator==(const TrainSetup&) const = default;
};

struct TrainConfig {
  std::int64_t episodes = 60000;
  int update_interval = 10;    // episodes between update phases
  int updates_per_phase = 20;  // gradient updates per network per phase
  int batch_size = 256;
  std::size_t replay_capacity = 100000;
  DesignSpace design_space;
  std::uint64_t seed = 0;
  ArchitectureTable arch;
  SystemKind system = SystemKind::kHypernet;
  double lr_actor = 4e-5;
  double lr_critic = 3e-4;
  double lr_mean = 1e-4;
  double gamma = 1.0;
  double entropy_weight = 0.01;
  int critic_target_refresh = 200;
  int nonfinite_abort_streak = 50;
  std::int64_t checkpoint_every = 0;  // episodes; 0 keeps only the final state

  bool operator==(const TrainConfig&) const = default;
};

struct EpisodeRow {
  std::int64_t episode = 0;
  int n_c = 0;
  double alpha = 0;
  std::int64_t served_demand = 0;
  std::int64_t total_requests = 0;
  double served_fares = 0;
  double total_fares = 0;
  double orr = 0;
  double pr = 0;
};

struct UpdateRow {
  std::int64_t phase = 0;
  std::int64_t episode = 0;
  double critic_loss_c = 0, critic_loss_u = 0;
  double actor_loss_c = 0, actor_loss_u = 0;
  double mean_loss_c = 0, mean_loss_u = 0;
};

/// Everything the training loop accumulates: the policy system, the two mean
/// action networks, the RNG stream, and the run history. Checkpoints
/// round-trip bit-exact; the replay buffer is rebuilt on resume, so resumed
/// runs are guaranteed to reproduce the next sampled context rather than the
/// whole gradient trajectory.
struct TrainedBundle {
  TrainSetup setup;
  TrainConfig config;
  std::unique_ptr<PolicySystem> system;
  mfac::MeanNet mean_c;
  mfac::MeanNet mean_u;
  Rng rng;
  std::int64_t episodes_done = 0;
  std::vector<EpisodeRow> history;
  std::vector<UpdateRow> update_history;

  const mfac::MeanNet& mean_net(env::AgentType type) const {
    return type == env::AgentType::kControllable ? mean_c : mean_u;
  }
  env::RewardParams reward_params(const GameContext& ctx, double hourly_rate) const;
  env::Composition composition(const GameContext& ctx) const;
  /// FNV-1a over the serialized parameters; stamps evaluation reports.
  std::uint64_t param_hash() const;
};

/// Fresh bundle with initialized networks (episode count 0).
TrainedBundle make_bundle(const TrainSetup& setup, const TrainConfig& config);

using CheckpointHook = std::function<void(const TrainedBundle&)>;

/// Runs episodes until `bundle.episodes_done == bundle.config.episodes`,
/// interleaving update phases every `update_interval` episodes. Throws
/// TrainDivergence after `nonfinite_abort_streak` consecutive non-finite
/// losses (invoking the hook first so a diagnostic checkpoint survives).
void train(TrainedBundle& bundle, const data::DemandModel& demand,
           const CheckpointHook& hook = nullptr);

struct TrainDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void save_bundle(const std::string& path, const TrainedBundle& bundle);
TrainedBundle load_bundle(const std::string& path);

}  // namespace pcmas::traininging
