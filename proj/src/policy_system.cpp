#include "pcmas/policy_system.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "pcmas/observation.hpp"

namespace pcmas::training {

namespace {

int type_index(env::AgentType type) { return type == env::AgentType::kControllable ? 0 : 1; }

nn::MlpSpec actor_target_spec(const data::GridSpec& grid, bool with_context,
                              const ArchitectureTable& arch) {
  const int input = mfac::observation_dim(grid, with_context) + env::kNumActions;
  return nn::make_mlp_spec(input, arch.actor_target_hidden, env::kNumActions,
                           nn::OutputHead::kSoftmax);
}

nn::MlpSpec critic_target_spec(const data::GridSpec& grid, bool with_context,
                               const ArchitectureTable& arch) {
  const int input = mfac::observation_dim(grid, with_context) + env::kNumActions;
  return nn::make_mlp_spec(input, arch.critic_target_hidden, env::kNumActions,
                           nn::OutputHead::kLinear);
}

// Shared loss plumbing: per-group target-network gradients.
struct GroupGrads {
  Matrix per_group;  // target param count x group count
  double loss = 0;   // mean over the whole batch
};

GroupGrads critic_group_grads(const nn::MlpSpec& spec,
                              const std::vector<const mfac::Transition*>& batch,
                              const ContextGroups& groups, const GeneratedParams& generated,
                              const std::vector<double>& targets) {
  GroupGrads out;
  out.per_group = Matrix::Zero(nn::param_count(spec), groups.contexts.size());
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t g = 0; g < groups.contexts.size(); ++g) {
    const auto& samples = groups.samples_of_group[g];
    Matrix inputs(spec.input_dim(), samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const mfac::Transition& tr = *batch[samples[k]];
      inputs.col(k) = mfac::policy_input(tr.observation, tr.mean_action);
    }
    const Matrix q = nn::forward_batch(spec, generated.critic[g], inputs);
    Matrix out_grads = Matrix::Zero(spec.output_dim(), samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const mfac::Transition& tr = *batch[samples[k]];
      const double err = q(tr.action, static_cast<Eigen::Index>(k)) - targets[samples[k]];
      out.loss += err * err * inv_n;
      out_grads(tr.action, static_cast<Eigen::Index>(k)) = 2.0 * err * inv_n;
    }
    out.per_group.col(g) =
        nn::backward_batch(spec, generated.critic[g], inputs, out_grads).param_grad;
  }
  return out;
}

GroupGrads actor_group_grads(const nn::MlpSpec& spec,
                             const std::vector<const mfac::Transition*>& batch,
                             const ContextGroups& groups, const GeneratedParams& generated,
                             const std::vector<double>& advantages, double entropy_weight) {
  GroupGrads out;
  out.per_group = Matrix::Zero(nn::param_count(spec), groups.contexts.size());
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  constexpr double kFloor = 1e-12;
  for (std::size_t g = 0; g < groups.contexts.size(); ++g) {
    const auto& samples = groups.samples_of_group[g];
    Matrix inputs(spec.input_dim(), samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const mfac::Transition& tr = *batch[samples[k]];
      inputs.col(k) = mfac::policy_input(tr.observation, tr.mean_action);
    }
    const Matrix probs = nn::forward_batch(spec, generated.actor[g], inputs);
    Matrix out_grads(spec.output_dim(), samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const mfac::Transition& tr = *batch[samples[k]];
      const Vector p = probs.col(static_cast<Eigen::Index>(k)).cwiseMax(kFloor);
      const double advantage = advantages[samples[k]];
      const double entropy = -p.dot(p.array().log().matrix());
      out.loss += (-std::log(p[tr.action]) * advantage - entropy_weight * entropy) * inv_n;
      Vector dp = entropy_weight * (p.array().log() + 1.0).matrix();
      dp[tr.action] -= advantage / p[tr.action];
      out_grads.col(static_cast<Eigen::Index>(k)) = dp * inv_n;
    }
    out.per_group.col(g) =
        nn::backward_batch(spec, generated.actor[g], inputs, out_grads).param_grad;
  }
  return out;
}

class HypernetSystem final : public PolicySystem {
 public:
  HypernetSystem(const data::GridSpec& grid, int total_agents, const ArchitectureTable& arch,
                 int critic_target_refresh, std::uint64_t seed)
      : total_agents_(total_agents),
        refresh_every_(critic_target_refresh),
        actor_spec_(actor_target_spec(grid, true, arch)),
        critic_spec_(critic_target_spec(grid, true, arch)) {
    nn::HypernetSpec actor_h;
    actor_h.context_dim = 2;
    actor_h.hidden = arch.actor_hyper_hidden;
    actor_h.target = actor_spec_;
    nn::HypernetSpec critic_h;
    critic_h.context_dim = 2;
    critic_h.hidden = arch.critic_hyper_hidden;
    critic_h.target = critic_spec_;
    for (int i = 0; i < 2; ++i) {
      actor_[i] = nn::HypernetState::fresh(actor_h, mix_seed(seed, 2 * i));
      critic_[i] = nn::HypernetState::fresh(critic_h, mix_seed(seed, 2 * i + 1));
      critic_target_phi_[i] = critic_[i].phi;
      updates_since_refresh_[i] = 0;
    }
  }

  SystemKind kind() const override { return SystemKind::kHypernet; }
  bool context_in_observation() const override { return true; }
  bool context_dependent_params() const override { return true; }
  const nn::MlpSpec& actor_spec() const override { return actor_spec_; }
  const nn::MlpSpec& critic_spec() const override { return critic_spec_; }

  GeneratedParams generate(env::AgentType type,
                           const std::vector<GameContext>& contexts) const override {
    const int i = type_index(type);
    Matrix ctx(2, contexts.size());
    for (std::size_t j = 0; j < contexts.size(); ++j) {
      ctx.col(j) = normalized_context(contexts[j], total_agents_);
    }
    const Matrix actors = nn::hyper_forward_batch(actor_[i].spec, actor_[i].phi, ctx);
    const Matrix critics = nn::hyper_forward_batch(critic_[i].spec, critic_[i].phi, ctx);
    const Matrix targets = nn::hyper_forward_batch(critic_[i].spec, critic_target_phi_[i], ctx);
    GeneratedParams out;
    for (std::size_t j = 0; j < contexts.size(); ++j) {
      out.actor.push_back(actors.col(j));
      out.critic.push_back(critics.col(j));
      out.critic_target.push_back(targets.col(j));
    }
    return out;
  }

  double critic_update(env::AgentType type, const std::vector<const mfac::Transition*>& batch,
                       const ContextGroups& groups, const GeneratedParams& generated,
                       const std::vector<double>& targets, double learning_rate) override {
    const int i = type_index(type);
    const GroupGrads grads =
        critic_group_grads(critic_spec_, batch, groups, generated, targets);
    if (std::isfinite(grads.loss)) {
      Matrix ctx(2, groups.contexts.size());
      for (std::size_t g = 0; g < groups.contexts.size(); ++g) {
        ctx.col(g) = normalized_context(groups.contexts[g], total_agents_);
      }
      const Vector phi_grad =
          nn::hyper_backward_batch(critic_[i].spec, critic_[i].phi, ctx, grads.per_group);
      nn::adam_step(critic_[i].phi, phi_grad, critic_[i].opt, learning_rate);
      if (++updates_since_refresh_[i] >= refresh_every_) {
        critic_target_phi_[i] = critic_[i].phi;
        updates_since_refresh_[i] = 0;
      }
    }
    return grads.loss;
  }

  double actor_update(env::AgentType type, const std::vector<const mfac::Transition*>& batch,
                      const ContextGroups& groups, const GeneratedParams& generated,
                      const std::vector<double>& advantages, double entropy_weight,
                      double learning_rate) override {
    const int i = type_index(type);
    const GroupGrads grads =
        actor_group_grads(actor_spec_, batch, groups, generated, advantages, entropy_weight);
    if (std::isfinite(grads.loss)) {
      Matrix ctx(2, groups.contexts.size());
      for (std::size_t g = 0; g < groups.contexts.size(); ++g) {
        ctx.col(g) = normalized_context(groups.contexts[g], total_agents_);
      }
      const Vector phi_grad =
          nn::hyper_backward_batch(actor_[i].spec, actor_[i].phi, ctx, grads.per_group);
      nn::adam_step(actor_[i].phi, phi_grad, actor_[i].opt, learning_rate);
    }
    return grads.loss;
  }

  std::int64_t learnable_params() const override {
    std::int64_t total = 0;
    for (int i = 0; i < 2; ++i) {
      total += nn::param_count(actor_[i].spec) + nn::param_count(critic_[i].spec);
    }
    return total;
  }

  void save(io::BinaryWriter& w) const override {
    w.i64(total_agents_);
    w.i64(refresh_every_);
    for (int i = 0; i < 2; ++i) {
      nn::write_hypernet(w, actor_[i]);
      nn::write_hypernet(w, critic_[i]);
      w.vec(critic_target_phi_[i]);
      w.i64(updates_since_refresh_[i]);
    }
  }

  void load(io::BinaryReader& r) override {
    total_agents_ = static_cast<int>(r.i64());
    refresh_every_ = static_cast<int>(r.i64());
    for (int i = 0; i < 2; ++i) {
      actor_[i] = nn::read_hypernet(r);
      critic_[i] = nn::read_hypernet(r);
      critic_target_phi_[i] = r.vec();
      updates_since_refresh_[i] = static_cast<int>(r.i64());
    }
    actor_spec_ = actor_[0].spec.target;
    critic_spec_ = critic_[0].spec.target;
  }

 private:
  int total_agents_;
  int refresh_every_;
  nn::MlpSpec actor_spec_;
  nn::MlpSpec critic_spec_;
  nn::HypernetState actor_[2];   // [controllable, uncontrollable]
  nn::HypernetState critic_[2];
  Vector critic_target_phi_[2];
  int updates_since_refresh_[2] = {0, 0};
};

class PlainSystem final : public PolicySystem {
 public:
  PlainSystem(SystemKind kind, const data::GridSpec& grid, int total_agents,
              const ArchitectureTable& arch, int critic_target_refresh, std::uint64_t seed)
      : kind_(kind),
        total_agents_(total_agents),
        refresh_every_(critic_target_refresh),
        with_context_(kind == SystemKind::kAugTarget || kind == SystemKind::kAugTargetLarge),
        actor_spec_(actor_target_spec(grid, with_context_, arch)),
        critic_spec_(critic_target_spec(grid, with_context_, arch)) {
    for (int i = 0; i < 2; ++i) {
      actor_[i] = nn::NetworkState::fresh(actor_spec_, mix_seed(seed, 10 + 2 * i));
      critic_[i] = nn::NetworkState::fresh(critic_spec_, mix_seed(seed, 11 + 2 * i));
      critic_target_[i] = critic_[i].params;
      updates_since_refresh_[i] = 0;
    }
  }

  SystemKind kind() const override { return kind_; }
  bool context_in_observation() const override { return with_context_; }
  bool context_dependent_params() const override { return false; }
  const nn::MlpSpec& actor_spec() const override { return actor_spec_; }
  const nn::MlpSpec& critic_spec() const override { return critic_spec_; }

  GeneratedParams generate(env::AgentType type,
                           const std::vector<GameContext>& contexts) const override {
    const int i = type_index(type);
    GeneratedParams out;
    for (std::size_t j = 0; j < contexts.size(); ++j) {
      out.actor.push_back(actor_[i].params);
      out.critic.push_back(critic_[i].params);
      out.critic_target.push_back(critic_target_[i]);
    }
    return out;
  }

  double critic_update(env::AgentType type, const std::vector<const mfac::Transition*>& batch,
                       const ContextGroups& groups, const GeneratedParams& generated,
                       const std::vector<double>& targets, double learning_rate) override {
    (void)generated;
    if (groups.contexts.size() != 1) {
      throw std::logic_error("plain systems expect a collapsed context group");
    }
    const int i = type_index(type);
    const mfac::GradResult result =
        mfac::critic_grad(critic_spec_, critic_[i].params, batch, targets);
    if (std::isfinite(result.loss)) {
      nn::adam_step(critic_[i].params, result.grad, critic_[i].opt, learning_rate);
      if (++updates_since_refresh_[i] >= refresh_every_) {
        critic_target_[i] = critic_[i].params;
        updates_since_refresh_[i] = 0;
      }
    }
    return result.loss;
  }

  double actor_update(env::AgentType type, const std::vector<const mfac::Transition*>& batch,
                      const ContextGroups& groups, const GeneratedParams& generated,
                      const std::vector<double>& advantages, double entropy_weight,
                      double learning_rate) override {
    (void)generated;
    if (groups.contexts.size() != 1) {
      throw std::logic_error("plain systems expect a collapsed context group");
    }
    const int i = type_index(type);
    const mfac::GradResult result =
        mfac::actor_grad(actor_spec_, actor_[i].params, batch, advantages, entropy_weight);
    if (std::isfinite(result.loss)) {
      nn::adam_step(actor_[i].params, result.grad, actor_[i].opt, learning_rate);
    }
    return result.loss;
  }

  std::int64_t learnable_params() const override {
    return 2 * (nn::param_count(actor_spec_) + nn::param_count(critic_spec_));
  }

  void save(io::BinaryWriter& w) const override {
    w.i64(total_agents_);
    w.i64(refresh_every_);
    w.u32(with_context_ ? 1 : 0);
    for (int i = 0; i < 2; ++i) {
      nn::write_network(w, actor_[i]);
      nn::write_network(w, critic_[i]);
      w.vec(critic_target_[i]);
      w.i64(updates_since_refresh_[i]);
    }
  }

  void load(io::BinaryReader& r) override {
    total_agents_ = static_cast<int>(r.i64());
    refresh_every_ = static_cast<int>(r.i64());
    with_context_ = r.u32() != 0;
    for (int i = 0; i < 2; ++i) {
      actor_[i] = nn::read_network(r);
      critic_[i] = nn::read_network(r);
      critic_target_[i] = r.vec();
      updates_since_refresh_[i] = static_cast<int>(r.i64());
    }
    actor_spec_ = actor_[0].spec;
    critic_spec_ = critic_[0].spec;
  }

 private:
  SystemKind kind_;
  int total_agents_;
  int refresh_every_;
  bool with_context_;
  nn::MlpSpec actor_spec_;
  nn::MlpSpec critic_spec_;
  nn::NetworkState actor_[2];
  nn::NetworkState critic_[2];
  Vector critic_target_[2];
  int updates_since_refresh_[2] = {0, 0};
};

std::int64_t plain_system_params(const data::GridSpec& grid, bool with_context,
                                 const ArchitectureTable& arch) {
  return 2 * (nn::param_count(actor_target_spec(grid, with_context, arch)) +
              nn::param_count(critic_target_spec(grid, with_context, arch)));
}

}  // namespace

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::kHypernet: return "hyper";
    case SystemKind::kTarget: return "mlp";
    case SystemKind::kAugTarget: return "aug-mlp";
    case SystemKind::kTargetLarge: return "mlp-large";
    case SystemKind::kAugTargetLarge: return "aug-mlp-large";
  }
  return "unknown";
}

SystemKind system_kind_from_string(const std::string& name) {
  if (name == "hyper" || name == "ours") return SystemKind::kHypernet;
  if (name == "mlp" || name == "target") return SystemKind::kTarget;
  if (name == "aug-mlp" || name == "aug-target") return SystemKind::kAugTarget;
  if (name == "mlp-large" || name == "target-large") return SystemKind::kTargetLarge;
  if (name == "aug-mlp-large" || name == "aug-target-large") return SystemKind::kAugTargetLarge;
  throw std::invalid_argument("unknown system kind '" + name + "'");
}

std::string report_label(SystemKind kind) {
  switch (kind) {
    case SystemKind::kHypernet: return "Ours";
    case SystemKind::kTarget: return "MLP";
    case SystemKind::kAugTarget: return "AugMLP";
    case SystemKind::kTargetLarge: return "MLP-Large";
    case SystemKind::kAugTargetLarge: return "AugMLP-Large";
  }
  return "unknown";
}

ContextGroups group_by_context(const std::vector<const mfac::Transition*>& batch,
                               int total_agents, bool collapse) {
  ContextGroups groups;
  groups.group_of_sample.resize(batch.size());
  if (collapse) {
    groups.contexts.push_back(GameContext{0, 0.0});
    groups.samples_of_group.emplace_back();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      groups.group_of_sample[i] = 0;
      groups.samples_of_group[0].push_back(static_cast<int>(i));
    }
    return groups;
  }
  std::map<std::pair<int, double>, int> index;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const int n_c = static_cast<int>(std::lround(batch[i]->nc_frac * total_agents));
    const std::pair<int, double> key{n_c, batch[i]->alpha};
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(groups.contexts.size()));
    if (inserted) {
      groups.contexts.push_back(GameContext{n_c, batch[i]->alpha});
      groups.samples_of_group.emplace_back();
    }
    groups.group_of_sample[i] = it->second;
    groups.samples_of_group[it->second].push_back(static_cast<int>(i));
  }
  return groups;
}

Vector PolicySystem::actor_params(env::AgentType type, const GameContext& ctx) const {
  return generate(type, {ctx}).actor[0];
}

Vector PolicySystem::critic_params(env::AgentType type, const GameContext& ctx) const {
  return generate(type, {ctx}).critic[0];
}

std::vector<int> scale_hidden(const std::vector<int>& hidden, double scale) {
  std::vector<int> scaled;
  scaled.reserve(hidden.size());
  for (int h : hidden) {
    scaled.push_back(std::max(1, static_cast<int>(std::lround(h * scale))));
  }
  return scaled;
}

std::int64_t hypernet_system_params(const data::GridSpec& grid, const ArchitectureTable& arch) {
  nn::HypernetSpec actor_h;
  actor_h.context_dim = 2;
  actor_h.hidden = arch.actor_hyper_hidden;
  actor_h.target = actor_target_spec(grid, true, arch);
  nn::HypernetSpec critic_h;
  critic_h.context_dim = 2;
  critic_h.hidden = arch.critic_hyper_hidden;
  critic_h.target = critic_target_spec(grid, true, arch);
  return 2 * (nn::param_count(actor_h) + nn::param_count(critic_h));
}

nn::MlpSpec mean_net_spec(const data::GridSpec& grid, bool context_in_observation,
                          const ArchitectureTable& arch) {
  const int input = mfac::observation_dim(grid, context_in_observation) + env::kNumActions;
  return nn::make_mlp_spec(input, arch.mean_hidden, env::kNumActions, nn::OutputHead::kSoftmax);
}

std::unique_ptr<PolicySystem> make_policy_system(SystemKind kind, const data::GridSpec& grid,
                                                 int total_agents, const ArchitectureTable& arch,
                                                 int critic_target_refresh, std::uint64_t seed,
                                                 double large_tolerance) {
  if (kind == SystemKind::kHypernet) {
    return std::make_unique<HypernetSystem>(grid, total_agents, arch, critic_target_refresh,
                                            seed);
  }
  if (kind == SystemKind::kTarget || kind == SystemKind::kAugTarget) {
    return std::make_unique<PlainSystem>(kind, grid, total_agents, arch, critic_target_refresh,
                                         seed);
  }

  // Large variants: grow the hidden layers until the plain system's total
  // parameter count matches the hypernetwork system's.
  const bool with_context = kind == SystemKind::kAugTargetLarge;
  const std::int64_t budget = hypernet_system_params(grid, arch);
  auto count_at = [&](double scale) {
    ArchitectureTable scaled = arch;
    scaled.actor_target_hidden = scale_hidden(arch.actor_target_hidden, scale);
    scaled.critic_target_hidden = scale_hidden(arch.critic_target_hidden, scale);
    return std::make_pair(plain_system_params(grid, with_context, scaled), scaled);
  };

  double lo = 1.0, hi = 1.0;
  while (count_at(hi).first < budget && hi < 4096.0) hi *= 2.0;
  for (int iter = 0; iter < 80; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (count_at(mid).first < budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const auto [count_lo, arch_lo] = count_at(lo);
  const auto [count_hi, arch_hi] = count_at(hi);
  const bool lo_closer = budget - count_lo <= count_hi - budget;
  // The tolerance is a construction goal; if the layer granularity cannot
  // reach it, the achieved count is still reported via learnable_params().
  (void)large_tolerance;
  return std::make_unique<PlainSystem>(kind, grid, total_agents,
                                       lo_closer ? arch_lo : arch_hi, critic_target_refresh,
                                       seed);
}

void save_policy_system(io::BinaryWriter& w, const PolicySystem& system) {
  w.str(to_string(system.kind()));
  system.save(w);
}

std::unique_ptr<PolicySystem> load_policy_system(io::BinaryReader& r) {
  const SystemKind kind = system_kind_from_string(r.str());
  // A minimal placeholder is constructed, then overwritten field by field.
  ArchitectureTable arch;
  arch.actor_target_hidden = {1};
  arch.critic_target_hidden = {1};
  arch.actor_hyper_hidden = {1};
  arch.critic_hyper_hidden = {1};
  arch.mean_hidden = {1};
  data::GridSpec grid;
  grid.rows = 1;
  grid.cols = 1;
  std::unique_ptr<PolicySystem> system;
  if (kind == SystemKind::kHypernet) {
    system = std::make_unique<HypernetSystem>(grid, 1, arch, 1, 0);
  } else {
    system = std::make_unique<PlainSystem>(kind, grid, 1, arch, 1, 0);
  }
  system->load(r);
  return system;
}

}  // namespace pcmas::traininging
