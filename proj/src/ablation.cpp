#include "pcmas/ablation.hpp"

#include <cmath>

#include "pcmas/rollout.hpp"

namespace pcmas::eval {

AblationResult ablate_mean_net(const TrainedBundle& bundle, const data::DemandModel& demand,
                               const GameContext& ctx, double k, double hourly_rate,
                               int eval_runs, std::uint64_t seed) {
  AblationResult result;
  result.ctx = ctx;
  result.k = k;
  result.hourly_rate = hourly_rate;
  result.eval_runs = eval_runs;
  result.seed = seed;

  auto play = [&](training::MeanMode mode, std::uint64_t episode_seed) {
    env::Environment game(bundle.setup.grid, &demand, bundle.composition(ctx),
                          bundle.reward_params(ctx, hourly_rate), bundle.setup.horizon);
    training::RolloutOptions options;
    options.mean_mode = mode;
    const training::RolloutResult rollout =
        training::run_episode(game, *bundle.system, bundle.mean_c, bundle.mean_u, ctx,
                              bundle.setup.total_agents, options, episode_seed);
    return env::objective(rollout.metrics, k);
  };

  double sum_predicted = 0, sum_previous = 0, sum_delta_sq = 0;
  result.paired_deltas.reserve(eval_runs);
  for (int run = 0; run < eval_runs; ++run) {
    const std::uint64_t episode_seed = mix_seed(seed, static_cast<std::uint64_t>(run));
    const double predicted = play(training::MeanMode::kPredicted, episode_seed);
    const double previous = play(training::MeanMode::kPreviousTrue, episode_seed);
    sum_predicted += predicted;
    sum_previous += previous;
    const double delta = predicted - previous;
    result.paired_deltas.push_back(delta);
    sum_delta_sq += delta * delta;
  }
  const double n = static_cast<double>(eval_runs);
  result.objective_predicted = sum_predicted / n;
  result.objective_previous = sum_previous / n;
  result.delta = result.objective_predicted - result.objective_previous;
  result.relative_delta =
      result.objective_previous != 0.0 ? result.delta / std::abs(result.objective_previous) : 0.0;
  const double mean_delta = result.delta;
  const double var = std::max(0.0, sum_delta_sq / n - mean_delta * mean_delta);
  result.delta_se = eval_runs > 1 ? std::sqrt(var / n) : 0.0;
  return result;
}

}  // namespace pcmas::eval
