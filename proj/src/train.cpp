#include "pcmas/train.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pcmas/observation.hpp"

namespace pcmas::training {

env::RewardParams TrainedBundle::reward_params(const GameContext& ctx,
                                               double hourly_rate) const {
  env::RewardParams params;
  params.alpha = ctx.alpha;
  params.synthetic_fare_c = setup.synthetic_fare;
  params.hourly_rate = hourly_rate;
  return params;
}

env::Composition TrainedBundle::composition(const GameContext& ctx) const {
  return env::Composition{setup.total_agents - ctx.n_c, ctx.n_c};
}

TrainedBundle make_bundle(const TrainSetup& setup, const TrainConfig& config) {
  TrainedBundle bundle;
  bundle.setup = setup;
  bundle.config = config;
  bundle.system = make_policy_system(config.system, setup.grid, setup.total_agents, config.arch,
                                     config.critic_target_refresh, mix_seed(config.seed, 1000));
  const nn::MlpSpec mspec =
      mean_net_spec(setup.grid, bundle.system->context_in_observation(), config.arch);
  bundle.mean_c = mfac::MeanNet::fresh(mspec, mix_seed(config.seed, 2000));
  bundle.mean_u = mfac::MeanNet::fresh(mspec, mix_seed(config.seed, 2001));
  bundle.rng.seed(config.seed);
  return bundle;
}

namespace {

class Trainer {
 public:
  Trainer(TrainedBundle& bundle, const data::DemandModel& demand)
      : bundle_(bundle),
        demand_(demand),
        buffers_{mfac::ReplayBuffer(bundle.config.replay_capacity),
                 mfac::ReplayBuffer(bundle.config.replay_capacity)} {
    phases_done_ = static_cast<std::int64_t>(bundle.update_history.size());
    if (bundle_.setup.synthetic_fare == 0.0) {
      bundle_.setup.synthetic_fare = demand.mean_fare();
    }
  }

  void run(const CheckpointHook& hook) {
    const TrainConfig& config = bundle_.config;
    while (bundle_.episodes_done < config.episodes) {
      const GameContext ctx = sample_context(config.design_space, bundle_.rng);
      const std::uint64_t episode_seed = bundle_.rng();
      play_episode(ctx, episode_seed);
      ++bundle_.episodes_done;

      if (config.update_interval > 0 && bundle_.episodes_done % config.update_interval == 0) {
        update_phase(hook);
      }
      if (config.checkpoint_every > 0 && hook &&
          bundle_.episodes_done % config.checkpoint_every == 0) {
        hook(bundle_);
      }
    }
    if (hook) hook(bundle_);
  }

 private:
  void play_episode(const GameContext& ctx, std::uint64_t seed) {
    env::Environment game(bundle_.setup.grid, &demand_, bundle_.composition(ctx),
                          bundle_.reward_params(ctx, bundle_.setup.history_hourly_rate),
                          bundle_.setup.horizon);
    RolloutOptions options;
    options.collect_transitions = true;
    RolloutResult rollout = run_episode(game, *bundle_.system, bundle_.mean_c, bundle_.mean_u,
                                        ctx, bundle_.setup.total_agents, options, seed);
    for (mfac::Transition& tr : rollout.transitions) {
      const int i = tr.agent_type == env::AgentType::kControllable ? 0 : 1;
      buffers_[i].push(std::move(tr));
    }
    EpisodeRow row;
    row.episode = bundle_.episodes_done + 1;
    row.n_c = ctx.n_c;
    row.alpha = ctx.alpha;
    row.served_demand = rollout.metrics.served_demand;
    row.total_requests = rollout.metrics.total_requests;
    row.served_fares = rollout.metrics.served_fares;
    row.total_fares = rollout.metrics.total_fares;
    row.orr = rollout.metrics.orr;
    row.pr = rollout.metrics.pr;
    bundle_.history.push_back(row);
  }

  void update_phase(const CheckpointHook& hook) {
    const TrainConfig& config = bundle_.config;
    UpdateRow row;
    row.phase = ++phases_done_;
    row.episode = bundle_.episodes_done;
    for (int step = 0; step < config.updates_per_phase; ++step) {
      for (int i = 0; i < 2; ++i) {
        const env::AgentType type =
            i == 0 ? env::AgentType::kControllable : env::AgentType::kUncontrollable;
        double& critic_loss = i == 0 ? row.critic_loss_c : row.critic_loss_u;
        double& actor_loss = i == 0 ? row.actor_loss_c : row.actor_loss_u;
        double& mean_loss = i == 0 ? row.mean_loss_c : row.mean_loss_u;
        critic_loss = critic_update(type, i, hook);
        actor_loss = actor_update(type, i, hook);
        mean_loss = mean_update(type, i, hook);
      }
    }
    bundle_.update_history.push_back(row);
  }

  std::vector<const mfac::Transition*> sample_batch(int buffer_index) {
    if (buffers_[buffer_index].size() == 0) return {};
    return buffers_[buffer_index].sample(bundle_.config.batch_size, bundle_.rng);
  }

  double critic_update(env::AgentType type, int buffer_index, const CheckpointHook& hook) {
    const auto batch = sample_batch(buffer_index);
    if (batch.empty()) return 0.0;
    const ContextGroups groups = group_by_context(batch, bundle_.setup.total_agents,
                                                  !bundle_.system->context_dependent_params());
    const GeneratedParams generated = bundle_.system->generate(type, groups.contexts);
    std::vector<double> targets(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const int g = groups.group_of_sample[i];
      targets[i] = mfac::td_target(*batch[i], bundle_.system->actor_spec(), generated.actor[g],
                                   bundle_.system->critic_spec(), generated.critic_target[g],
                                   bundle_.config.gamma, bundle_.rng);
    }
    const double loss = bundle_.system->critic_update(type, batch, groups, generated, targets,
                                                      bundle_.config.lr_critic);
    track_loss(loss, hook);
    return loss;
  }

  double actor_update(env::AgentType type, int buffer_index, const CheckpointHook& hook) {
    const auto batch = sample_batch(buffer_index);
    if (batch.empty()) return 0.0;
    const ContextGroups groups = group_by_context(batch, bundle_.setup.total_agents,
                                                  !bundle_.system->context_dependent_params());
    const GeneratedParams generated = bundle_.system->generate(type, groups.contexts);
    std::vector<double> advantages(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const int g = groups.group_of_sample[i];
      advantages[i] =
          mfac::advantage(*batch[i], bundle_.system->actor_spec(), generated.actor[g],
                          bundle_.system->critic_spec(), generated.critic[g]);
    }
    const double loss =
        bundle_.system->actor_update(type, batch, groups, generated, advantages,
                                     bundle_.config.entropy_weight, bundle_.config.lr_actor);
    track_loss(loss, hook);
    return loss;
  }

  double mean_update(env::AgentType type, int buffer_index, const CheckpointHook& hook) {
    const auto batch = sample_batch(buffer_index);
    if (batch.empty()) return 0.0;
    std::vector<mfac::MeanSample> samples(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      samples[i].input = mfac::policy_input(batch[i]->observation,
                                            mfac::action_one_hot(batch[i]->prev_action));
      samples[i].label = batch[i]->mean_action;
    }
    mfac::MeanNet& net =
        type == env::AgentType::kControllable ? bundle_.mean_c : bundle_.mean_u;
    const double loss = mfac::mean_net_update(net, samples, bundle_.config.lr_mean);
    track_loss(loss, hook);
    return loss;
  }

  void track_loss(double loss, const CheckpointHook& hook) {
    if (std::isfinite(loss)) {
      nonfinite_streak_ = 0;
      return;
    }
    if (++nonfinite_streak_ > bundle_.config.nonfinite_abort_streak) {
      if (hook) hook(bundle_);  // diagnostic checkpoint before aborting
      throw TrainDivergence("training diverged: " + std::to_string(nonfinite_streak_) +
                            " consecutive non-finite losses at episode " +
                            std::to_string(bundle_.episodes_done));
    }
  }

  TrainedBundle& bundle_;
  const data::DemandModel& demand_;
  mfac::ReplayBuffer buffers_[2];  // [controllable, uncontrollable]
  std::int64_t phases_done_ = 0;
  int nonfinite_streak_ = 0;
};

constexpr const char* kBundleMagic = "pcmas-bundle";
constexpr std::uint32_t kBundleVersion = 1;

void write_setup(io::BinaryWriter& w, const TrainSetup& setup) {
  w.f64(setup.grid.origin_lon);
  w.f64(setup.grid.origin_lat);
  w.i64(setup.grid.rows);
  w.i64(setup.grid.cols);
  w.f64(setup.grid.cell_km);
  w.i64(setup.total_agents);
  w.i64(setup.horizon);
  w.f64(setup.episode_hours);
  w.f64(setup.synthetic_fare);
  w.f64(setup.history_hourly_rate);
}

TrainSetup read_setup(io::BinaryReader& r) {
  TrainSetup setup;
  setup.grid.origin_lon = r.f64();
  setup.grid.origin_lat = r.f64();
  setup.grid.rows = static_cast<int>(r.i64());
  setup.grid.cols = static_cast<int>(r.i64());
  setup.grid.cell_km = r.f64();
  setup.total_agents = static_cast<int>(r.i64());
  setup.horizon = static_cast<int>(r.i64());
  setup.episode_hours = r.f64();
  setup.synthetic_fare = r.f64();
  setup.history_hourly_rate = r.f64();
  return setup;
}

void write_config(io::BinaryWriter& w, const TrainConfig& config) {
  w.i64(config.episodes);
  w.i64(config.update_interval);
  w.i64(config.updates_per_phase);
  w.i64(config.batch_size);
  w.u64(config.replay_capacity);
  w.i64(config.design_space.n_c_min);
  w.i64(config.design_space.n_c_max);
  w.f64(config.design_space.alpha_min);
  w.f64(config.design_space.alpha_max);
  w.u64(config.seed);
  w.ints(config.arch.actor_target_hidden);
  w.ints(config.arch.critic_target_hidden);
  w.ints(config.arch.actor_hyper_hidden);
  w.ints(config.arch.critic_hyper_hidden);
  w.ints(config.arch.mean_hidden);
  w.str(to_string(config.system));
  w.f64(config.lr_actor);
  w.f64(config.lr_critic);
  w.f64(config.lr_mean);
  w.f64(config.gamma);
  w.f64(config.entropy_weight);
  w.i64(config.critic_target_refresh);
  w.i64(config.nonfinite_abort_streak);
  w.i64(config.checkpoint_every);
}

TrainConfig read_config(io::BinaryReader& r) {
  TrainConfig config;
  config.episodes = r.i64();
  config.update_interval = static_cast<int>(r.i64());
  config.updates_per_phase = static_cast<int>(r.i64());
  config.batch_size = static_cast<int>(r.i64());
  config.replay_capacity = r.u64();
  config.design_space.n_c_min = static_cast<int>(r.i64());
  config.design_space.n_c_max = static_cast<int>(r.i64());
  config.design_space.alpha_min = r.f64();
  config.design_space.alpha_max = r.f64();
  config.seed = r.u64();
  config.arch.actor_target_hidden = r.ints();
  config.arch.critic_target_hidden = r.ints();
  config.arch.actor_hyper_hidden = r.ints();
  config.arch.critic_hyper_hidden = r.ints();
  config.arch.mean_hidden = r.ints();
  config.system = system_kind_from_string(r.str());
  config.lr_actor = r.f64();
  config.lr_critic = r.f64();
  config.lr_mean = r.f64();
  config.gamma = r.f64();
  config.entropy_weight = r.f64();
  config.critic_target_refresh = static_cast<int>(r.i64());
  config.nonfinite_abort_streak = static_cast<int>(r.i64());
  config.checkpoint_every = r.i64();
  return config;
}

void write_mean_net(io::BinaryWriter& w, const mfac::MeanNet& net) {
  nn::write_mlp_spec(w, net.spec);
  w.vec(net.params);
  nn::write_adam(w, net.opt);
}

mfac::MeanNet read_mean_net(io::BinaryReader& r) {
  mfac::MeanNet net;
  net.spec = nn::read_mlp_spec(r);
  net.params = r.vec();
  net.opt = nn::read_adam(r);
  return net;
}

}  // namespace

void train(TrainedBundle& bundle, const data::DemandModel& demand, const CheckpointHook& hook) {
  Trainer trainer(bundle, demand);
  trainer.run(hook);
}

std::uint64_t TrainedBundle::param_hash() const {
  std::ostringstream buffer;
  io::BinaryWriter w(buffer);
  save_policy_system(w, *system);
  write_mean_net(w, mean_c);
  write_mean_net(w, mean_u);
  const std::string bytes = buffer.str();
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 1099511628211ULL;
  }
  return hash;
}

void save_bundle(const std::string& path, const TrainedBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  io::BinaryWriter w(out);
  w.str(kBundleMagic);
  w.u32(kBundleVersion);
  write_setup(w, bundle.setup);
  write_config(w, bundle.config);
  save_policy_system(w, *bundle.system);
  write_mean_net(w, bundle.mean_c);
  write_mean_net(w, bundle.mean_u);
  w.rng(bundle.rng);
  w.i64(bundle.episodes_done);
  w.u64(bundle.history.size());
  for (const EpisodeRow& row : bundle.history) {
    w.i64(row.episode);
    w.i64(row.n_c);
    w.f64(row.alpha);
    w.i64(row.served_demand);
    w.i64(row.total_requests);
    w.f64(row.served_fares);
    w.f64(row.total_fares);
    w.f64(row.orr);
    w.f64(row.pr);
  }
  w.u64(bundle.update_history.size());
  for (const UpdateRow& row : bundle.update_history) {
    w.i64(row.phase);
    w.i64(row.episode);
    w.f64(row.critic_loss_c);
    w.f64(row.critic_loss_u);
    w.f64(row.actor_loss_c);
    w.f64(row.actor_loss_u);
    w.f64(row.mean_loss_c);
    w.f64(row.mean_loss_u);
  }
}

TrainedBundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  io::BinaryReader r(in);
  io::expect_tag(r, kBundleMagic);
  const std::uint32_t version = r.u32();
  if (version != kBundleVersion) {
    throw io::CorruptFileError("unsupported bundle version " + std::to_string(version));
  }
  TrainedBundle bundle;
  bundle.setup = read_setup(r);
  bundle.config = read_config(r);
  bundle.system = load_policy_system(r);
  bundle.mean_c = read_mean_net(r);
  bundle.mean_u = read_mean_net(r);
  bundle.rng = r.rng();
  bundle.episodes_done = r.i64();
  const std::uint64_t n_history = r.u64();
  for (std::uint64_t i = 0; i < n_history; ++i) {
    EpisodeRow row;
    row.episode = r.i64();
    row.n_c = static_cast<int>(r.i64());
    row.alpha = r.f64();
    row.served_demand = r.i64();
    row.total_requests = r.i64();
    row.served_fares = r.f64();
    row.total_fares = r.f64();
    row.orr = r.f64();
    row.pr = r.f64();
    bundle.history.push_back(row);
  }
  const std::uint64_t n_updates = r.u64();
  for (std::uint64_t i = 0; i < n_updates; ++i) {
    UpdateRow row;
    row.phase = r.i64();
    row.episode = r.i64();
    row.critic_loss_c = r.f64();
    row.critic_loss_u = r.f64();
    row.actor_loss_c = r.f64();
    row.actor_loss_u = r.f64();
    row.mean_loss_c = r.f64();
    row.mean_loss_u = r.f64();
    bundle.update_history.push_back(row);
  }
  return bundle;
}

}  // namespace pcmas::traininging
