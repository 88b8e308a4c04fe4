#pragma once

#include "pcmas/train.hpp"

namespace pcmas::eval {

using training::GameContext;
using training::TrainedBundle;

/// Paired comparison of decision-time mean actions: the mean action network's
/// prediction versus each agent's previous true mean action. Both arms play
/// the same seeds and episode counts.
struct AblationResult {
  GameContext ctx;
  double k = 0;
  double hourly_rate = 0;
  int eval_runs = 0;
  std::uint64_t seed = 0;
  double objective_predicted = 0;
  double objective_previous = 0;
  double delta = 0;           // predicted - previous
  double relative_delta = 0;  // delta / |previous|
  double delta_se = 0;        // from the paired per-episode differences
  std::vector<double> paired_deltas;
};

AblationResult ablate_mean_net(const TrainedBundle& bundle, const data::DemandModel& demand,
                               const GameContext& ctx, double k, double hourly_rate,
                               int eval_runs, std::uint64_t seed);

}  // namespace pcmas::eval
