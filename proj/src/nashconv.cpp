#include "pcmas/nashconv.hpp"

#include <cmath>

#include "pcmas/parallel.hpp"
#include "pcmas/rollout.hpp"

namespace pcmas::eval {

namespace {

struct Series {
  double mean = 0;
  double se = 0;
};

Series summarize(const std::vector<double>& values) {
  Series s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0, sum_sq = 0;
  for (double v : values) {
    sum += v;
    sum_sq += v * v;
  }
  s.mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - s.mean * s.mean);
  s.se = values.size() > 1 ? std::sqrt(var / n) : 0.0;
  return s;
}

}  // namespace

NashConvRow evaluate_context(const TrainedBundle& bundle, const data::DemandModel& demand,
                             const GameContext& ctx, env::AgentType type,
                             const nn::MlpSpec& br_actor_spec, const Vector& br_actor,
                             int eval_runs, std::uint64_t seed) {
  const int rep = representative_agent(ctx, bundle.setup.total_agents, type);

  RolloutOptions br_options;
  Deviator deviator;
  deviator.agent_id = rep;
  deviator.actor_spec = &br_actor_spec;
  deviator.actor_params = &br_actor;
  br_options.deviator = deviator;

  std::vector<double> br_fares, pop_fares;
  br_fares.reserve(eval_runs);
  pop_fares.reserve(eval_runs);
  for (int run = 0; run < eval_runs; ++run) {
    const std::uint64_t episode_seed = mix_seed(seed, static_cast<std::uint64_t>(run));
    {
      env::Environment game(bundle.setup.grid, &demand, bundle.composition(ctx),
                            bundle.reward_params(ctx, 0.0), bundle.setup.horizon);
      const RolloutResult rollout =
          training::run_episode(game, *bundle.system, bundle.mean_c, bundle.mean_u, ctx,
                                bundle.setup.total_agents, br_options, episode_seed);
      br_fares.push_back(rollout.agent_fare[rep]);
    }
    {
      env::Environment game(bundle.setup.grid, &demand, bundle.composition(ctx),
                            bundle.reward_params(ctx, 0.0), bundle.setup.horizon);
      const RolloutResult rollout =
          training::run_episode(game, *bundle.system, bundle.mean_c, bundle.mean_u, ctx,
                                bundle.setup.total_agents, RolloutOptions{}, episode_seed);
      double type_fares = 0;
      int type_count = 0;
      for (std::size_t id = 0; id < rollout.agent_fare.size(); ++id) {
        const bool controllable = static_cast<int>(id) < ctx.n_c;
        if ((type == env::AgentType::kControllable) == controllable) {
          type_fares += rollout.agent_fare[id];
          ++type_count;
        }
      }
      pop_fares.push_back(type_count > 0 ? type_fares / type_count : 0.0);
    }
  }

  const Series br = summarize(br_fares);
  const Series pop = summarize(pop_fares);
  NashConvRow row;
  row.ctx = ctx;
  row.type = type;
  row.seed = seed;
  row.br_value = br.mean;
  row.pop_value = pop.mean;
  row.nashconv = br.mean - pop.mean;
  row.br_se = br.se;
  row.pop_se = pop.se;
  row.eval_runs = eval_runs;
  return row;
}

NashConvReport nashconv(const TrainedBundle& bundle, const data::DemandModel& demand,
                        const NashConvConfig& config, int workers) {
  struct Task {
    GameContext ctx;
    env::AgentType type;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const GameContext& ctx : config.grid) {
    for (const env::AgentType type :
         {env::AgentType::kControllable, env::AgentType::kUncontrollable}) {
      const bool present = type == env::AgentType::kControllable
                               ? ctx.n_c > 0
                               : ctx.n_c < bundle.setup.total_agents;
      if (!present) continue;
      for (const std::uint64_t seed : config.seeds) tasks.push_back({ctx, type, seed});
    }
  }

  NashConvReport report;
  report.bundle_hash = bundle.param_hash();
  report.rows.resize(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), workers, [&](int i) {
    const Task& task = tasks[i];
    BrConfig br_config = config.br;
    br_config.representative_type = task.type;
    const BrPolicy br =
        train_best_response(bundle, demand, task.ctx, br_config, mix_seed(task.seed, 7000 + i));
    NashConvRow row =
        evaluate_context(bundle, demand, task.ctx, task.type, br.nets.actor_spec, br.nets.actor,
                         config.eval_runs, mix_seed(task.seed, 8000 + i));
    row.seed = task.seed;
    row.br_episodes = br.episodes_trained;
    report.rows[i] = row;
  });
  return report;
}

}  // namespace pcmas::eval
