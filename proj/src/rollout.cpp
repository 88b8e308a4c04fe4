#include "pcmas/rollout.hpp"

#include "pcmas/observation.hpp"

namespace pcmas::training {

namespace {

int argmax(const Vector& v) {
  Eigen::Index best = 0;
  v.maxCoeff(&best);
  return static_cast<int>(best);
}

}  // namespace

RolloutResult run_episode(env::Environment& env, const PolicySystem& system,
                          const mfac::MeanNet& mean_c, const mfac::MeanNet& mean_u,
                          const GameContext& ctx, int total_agents,
                          const RolloutOptions& options, std::uint64_t seed) {
  const bool with_context = system.context_in_observation();
  const double nc_frac =
      total_agents > 0 ? static_cast<double>(ctx.n_c) / total_agents : 0.0;
  const GeneratedParams generated = system.generate(env::AgentType::kControllable, {ctx});
  const GeneratedParams generated_u = system.generate(env::AgentType::kUncontrollable, {ctx});
  const Vector* actor_of_type[2] = {&generated.actor[0], &generated_u.actor[0]};
  const mfac::MeanNet* mean_of_type[2] = {&mean_c, &mean_u};

  env.reset(mix_seed(seed, 0));
  Rng action_rng(mix_seed(seed, 1));

  const int n = static_cast<int>(env.drivers().size());
  RolloutResult result;
  result.agent_reward.assign(n, 0.0);
  result.agent_fare.assign(n, 0.0);

  // Per-agent decision bookkeeping.
  std::vector<int> prev_action(n, -1);
  std::vector<Vector> last_true_mean(n, mfac::uniform_mean_action());
  struct Pending {
    bool active = false;
    mfac::Transition tr;
  };
  std::vector<Pending> pending(n);

  auto flush_pending = [&](int id, const Vector& next_obs, const Vector& next_mean,
                           bool terminal) {
    Pending& p = pending[id];
    if (!p.active) return;
    p.tr.next_observation = next_obs;
    p.tr.next_mean_action = next_mean;
    p.tr.terminal = terminal;
    const bool is_deviator = options.deviator && options.deviator->agent_id == id;
    if (is_deviator) {
      if (options.collect_deviator_transitions) result.deviator_transitions.push_back(p.tr);
    } else if (options.collect_transitions) {
      result.transitions.push_back(p.tr);
    }
    p.active = false;
  };

  while (!env.done()) {
    const int t = env.t();
    const std::vector<int> actors = env.acting_drivers();

    // Decision-time cells (before movement) define the neighborhood.
    std::vector<int> actor_cells(actors.size());
    std::vector<Vector> observations(actors.size());
    std::vector<int> chosen(actors.size());
    std::vector<env::Action> joint(n, env::kStay);

    for (std::size_t k = 0; k < actors.size(); ++k) {
      const int id = actors[k];
      const auto& driver = env.drivers()[id];
      actor_cells[k] = driver.cell;
      observations[k] = mfac::observe(env.grid(), driver.cell, t, env.horizon(), nc_frac,
                                      ctx.alpha, with_context);

      const bool is_deviator = options.deviator && options.deviator->agent_id == id;
      const int type = driver.type == env::AgentType::kControllable ? 0 : 1;
      Vector mean_input;
      if (is_deviator || options.mean_mode == MeanMode::kPreviousTrue) {
        mean_input = last_true_mean[id];
      } else {
        mean_input = mfac::predict_mean_action(mean_of_type[type]->spec,
                                               mean_of_type[type]->params, observations[k],
                                               mfac::action_one_hot(prev_action[id]));
      }
      const Vector probs =
          is_deviator
              ? mfac::policy_probs(*options.deviator->actor_spec, *options.deviator->actor_params,
                                   observations[k], mean_input)
              : mfac::policy_probs(system.actor_spec(), *actor_of_type[type], observations[k],
                                   mean_input);
      chosen[k] = options.greedy ? argmax(probs) : mfac::sample_action(probs, action_rng);
      joint[id] = static_cast<env::Action>(chosen[k]);
    }

    // True mean actions over decision-time neighborhoods.
    const std::vector<Vector> true_means = mfac::true_mean_actions(actor_cells, chosen);

    const env::StepResult step = env.step(joint);
    for (std::size_t i = 0; i < step.orders.size(); ++i) {
      if (step.matched_driver[i] >= 0) {
        result.agent_fare[step.matched_driver[i]] += step.orders[i].fare;
      }
    }

    for (std::size_t k = 0; k < actors.size(); ++k) {
      const int id = actors[k];
      flush_pending(id, observations[k], true_means[k], false);
      Pending& p = pending[id];
      p.active = true;
      p.tr = mfac::Transition{};
      p.tr.observation = observations[k];
      p.tr.action = chosen[k];
      p.tr.mean_action = true_means[k];
      p.tr.reward = step.rewards[id];
      p.tr.agent_type = env.drivers()[id].type;
      p.tr.nc_frac = nc_frac;
      p.tr.alpha = ctx.alpha;
      p.tr.prev_action = prev_action[id];
      p.tr.agent_id = id;

      result.agent_reward[id] += step.rewards[id];
      prev_action[id] = chosen[k];
      last_true_mean[id] = true_means[k];
    }
  }

  // Close every open decision with a terminal transition.
  for (int id = 0; id < n; ++id) {
    if (!pending[id].active) continue;
    const Vector final_obs = mfac::observe(env.grid(), env.drivers()[id].cell, env.horizon(),
                                           env.horizon(), nc_frac, ctx.alpha, with_context);
    flush_pending(id, final_obs, mfac::uniform_mean_action(), true);
  }

  result.metrics = env.metrics();
  return result;
}

}  // namespace pcmas::traininging
