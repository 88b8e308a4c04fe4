#include "pcmas/best_response.hpp"

#include <numeric>
#include <stdexcept>

#include "pcmas/observation.hpp"
#include "pcmas/rollout.hpp"

namespace pcmas::eval {

int representative_agent(const GameContext& ctx, int total_agents, env::AgentType type) {
  if (type == env::AgentType::kControllable) {
    if (ctx.n_c <= 0) throw std::invalid_argument("no controllable agents at this context");
    return 0;
  }
  if (ctx.n_c >= total_agents) {
    throw std::invalid_argument("no uncontrollable agents at this context");
  }
  return ctx.n_c;  // drivers [0, n_c) are controllable
}

BrPolicy train_best_response(const TrainedBundle& bundle, const data::DemandModel& demand,
                             const GameContext& ctx, const BrConfig& config, std::uint64_t seed) {
  const int rep = representative_agent(ctx, bundle.setup.total_agents,
                                       config.representative_type);
  const bool with_context = bundle.system->context_in_observation();
  const int obs_dim = mfac::observation_dim(bundle.setup.grid, with_context);
  const nn::MlpSpec actor_spec = nn::make_mlp_spec(obs_dim + env::kNumActions,
                                                   config.actor_hidden, env::kNumActions,
                                                   nn::OutputHead::kSoftmax);
  const nn::MlpSpec critic_spec = nn::make_mlp_spec(obs_dim + env::kNumActions,
                                                    config.critic_hidden, env::kNumActions,
                                                    nn::OutputHead::kLinear);

  BrPolicy br;
  br.nets = mfac::ActorCritic::fresh(actor_spec, critic_spec, mix_seed(seed, 90));
  mfac::ReplayBuffer buffer(config.replay_capacity);
  Rng rng(mix_seed(seed, 91));

  RolloutOptions options;
  options.collect_deviator_transitions = true;
  Deviator deviator;
  deviator.agent_id = rep;
  deviator.actor_spec = &br.nets.actor_spec;
  deviator.actor_params = &br.nets.actor;
  options.deviator = deviator;

  double prev_window_mean = -std::numeric_limits<double>::infinity();
  for (std::int64_t episode = 1; episode <= config.episodes; ++episode) {
    env::Environment game(bundle.setup.grid, &demand, bundle.composition(ctx),
                          bundle.reward_params(ctx, 0.0), bundle.setup.horizon);
    RolloutResult rollout = training::run_episode(game, *bundle.system, bundle.mean_c,
                                                  bundle.mean_u, ctx,
                                                  bundle.setup.total_agents, options, rng());
    for (mfac::Transition& tr : rollout.deviator_transitions) buffer.push(std::move(tr));
    br.episode_rewards.push_back(rollout.agent_reward[rep]);
    br.episodes_trained = episode;

    if (episode % config.update_interval == 0 && buffer.size() > 0) {
      for (int k = 0; k < config.updates_per_phase; ++k) {
        const auto batch = buffer.sample(config.batch_size, rng);
        mfac::critic_update(br.nets, batch, config.gamma, config.lr_critic,
                            config.critic_target_refresh, rng);
        mfac::actor_update(br.nets, batch, config.entropy_weight, config.lr_actor);
      }
    }

    if (config.plateau_window > 0 && episode % config.plateau_window == 0) {
      const auto begin = br.episode_rewards.end() - config.plateau_window;
      const double mean = std::accumulate(begin, br.episode_rewards.end(), 0.0) /
                          static_cast<double>(config.plateau_window);
      if (mean <= prev_window_mean + config.plateau_tol) break;
      prev_window_mean = mean;
    }
  }
  return br;
}

}  // namespace pcmas::eval
