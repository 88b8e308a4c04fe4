#pragma once

#include <optional>

#include "pcmas/env.hpp"
#include "pcmas/policy_system.hpp"
#include "pcmas/replay.hpp"
#include "pcmas/updates.hpp"

namespace pcmas::training {

/// How agents obtain the mean action they condition on at decision time.
/// Training and standard evaluation predict it with the mean action network;
/// the ablation arm reuses each agent's previous true mean action (uniform
/// before the first decision).
enum class MeanMode { kPredicted, kPreviousTrue };

/// A representative deviator: one agent follows an external policy instead
/// of its type's population policy. Best-response policies carry no mean
/// action network and always consume the previous true mean action.
struct Deviator {
  int agent_id = 0;
  const nn::MlpSpec* actor_spec = nullptr;
  const Vector* actor_params = nullptr;
};

struct RolloutOptions {
  bool collect_transitions = false;           // population transitions
  bool collect_deviator_transitions = false;  // deviator decision points
  MeanMode mean_mode = MeanMode::kPredicted;
  bool greedy = false;  // argmax instead of sampling
  std::optional<Deviator> deviator;
};

struct RolloutResult {
  std::vector<mfac::Transition> transitions;
  std::vector<mfac::Transition> deviator_transitions;
  env::Metrics metrics;             // objective field left 0; callers apply k
  std::vector<double> agent_reward; // per driver: training-signal total
  std::vector<double> agent_fare;   // per driver: true served fare total
};

/// Plays one full episode in `env` with policies generated from `system` at
/// `ctx`. The environment is reset with `seed`; action sampling shares the
/// episode RNG stream.
RolloutResult run_episode(env::Environment& env, const PolicySystem& system,
                          const mfac::MeanNet& mean_c, const mfac::MeanNet& mean_u,
                          const GameContext& ctx, int total_agents, const RolloutOptions& options,
                          std::uint64_t seed);

}  // namespace pcmas::traininging
