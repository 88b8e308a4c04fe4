#include "pcmas/updates.hpp"

#include <cmath>
#include <stdexcept>

namespace pcmas::mfac {

namespace {
constexpr double kLogFloor = 1e-12;
}

Vector policy_input(const Vector& observation, const Vector& mean_action) {
  Vector input(observation.size() + mean_action.size());
  input << observation, mean_action;
  return input;
}

Vector policy_probs(const nn::MlpSpec& actor_spec, const Vector& actor_params,
                    const Vector& observation, const Vector& mean_action) {
  return nn::forward(actor_spec, actor_params, policy_input(observation, mean_action));
}

Vector q_values(const nn::MlpSpec& critic_spec, const Vector& critic_params,
                const Vector& observation, const Vector& mean_action) {
  return nn::forward(critic_spec, critic_params, policy_input(observation, mean_action));
}

double q_value(const nn::MlpSpec& critic_spec, const Vector& critic_params,
               const Vector& observation, int action, const Vector& mean_action) {
  if (action < 0 || action >= env::kNumActions) {
    throw std::invalid_argument("q_value: action index out of range");
  }
  return q_values(critic_spec, critic_params, observation, mean_action)[action];
}

Vector predict_mean_action(const nn::MlpSpec& mean_spec, const Vector& mean_params,
                           const Vector& observation, const Vector& own_action_one_hot) {
  return nn::forward(mean_spec, mean_params, policy_input(observation, own_action_one_hot));
}

int sample_action(const Vector& probs, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  for (int a = 0; a < probs.size(); ++a) {
    u -= probs[a];
    if (u <= 0.0) return a;
  }
  return static_cast<int>(probs.size()) - 1;
}

double td_target(const Transition& tr, const nn::MlpSpec& actor_spec, const Vector& actor_params,
                 const nn::MlpSpec& critic_spec, const Vector& critic_target_params, double gamma,
                 Rng& rng) {
  if (tr.terminal) return tr.reward;
  const Vector next_probs =
      policy_probs(actor_spec, actor_params, tr.next_observation, tr.next_mean_action);
  const int next_action = sample_action(next_probs, rng);
  const double next_q = q_value(critic_spec, critic_target_params, tr.next_observation,
                                next_action, tr.next_mean_action);
  return tr.reward + gamma * next_q;
}

double advantage(const Transition& tr, const nn::MlpSpec& actor_spec, const Vector& actor_params,
                 const nn::MlpSpec& critic_spec, const Vector& critic_params) {
  const Vector q = q_values(critic_spec, critic_params, tr.observation, tr.mean_action);
  const Vector probs = policy_probs(actor_spec, actor_params, tr.observation, tr.mean_action);
  return q[tr.action] - probs.dot(q);
}

GradResult critic_grad(const nn::MlpSpec& critic_spec, const Vector& critic_params,
                       const std::vector<const Transition*>& batch,
                       const std::vector<double>& targets) {
  if (batch.empty()) throw std::invalid_argument("critic_grad: empty batch");
  if (batch.size() != targets.size()) {
    throw std::invalid_argument("critic_grad: batch/target size mismatch");
  }
  const int dim = critic_spec.input_dim();
  Matrix inputs(dim, batch.size());
  Matrix out_grads = Matrix::Zero(critic_spec.output_dim(), batch.size());
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  // First pass to evaluate Q(o, a); batched forward shares the layer work.
  for (std::size_t i = 0; i < batch.size(); ++i) {
    inputs.col(i) = policy_input(batch[i]->observation, batch[i]->mean_action);
  }
  const Matrix q = nn::forward_batch(critic_spec, critic_params, inputs);

  GradResult result;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double err = q(batch[i]->action, i) - targets[i];
    result.loss += err * err * inv_n;
    out_grads(batch[i]->action, i) = 2.0 * err * inv_n;
  }
  result.grad = nn::backward_batch(critic_spec, critic_params, inputs, out_grads).param_grad;
  return result;
}

GradResult actor_grad(const nn::MlpSpec& actor_spec, const Vector& actor_params,
                      const std::vector<const Transition*>& batch,
                      const std::vector<double>& advantages, double entropy_weight) {
  if (batch.empty()) throw std::invalid_argument("actor_grad: empty batch");
  if (batch.size() != advantages.size()) {
    throw std::invalid_argument("actor_grad: batch/advantage size mismatch");
  }
  const int dim = actor_spec.input_dim();
  Matrix inputs(dim, batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    inputs.col(i) = policy_input(batch[i]->observation, batch[i]->mean_action);
  }
  const Matrix probs = nn::forward_batch(actor_spec, actor_params, inputs);

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  Matrix out_grads(actor_spec.output_dim(), batch.size());
  GradResult result;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Vector p = probs.col(i).cwiseMax(kLogFloor);
    const int a = batch[i]->action;
    const double entropy = -p.dot(p.array().log().matrix());
    result.loss += (-std::log(p[a]) * advantages[i] - entropy_weight * entropy) * inv_n;
    // d/dp of -log(p_a) * A - w * H(p); the softmax head maps it back to
    // logits inside backward.
    Vector dp = Vector::Zero(p.size());
    dp[a] = -advantages[i] / p[a];
    dp += entropy_weight * (p.array().log() + 1.0).matrix();
    out_grads.col(i) = dp * inv_n;
  }
  result.grad = nn::backward_batch(actor_spec, actor_params, inputs, out_grads).param_grad;
  return result;
}

GradResult mean_net_grad(const nn::MlpSpec& mean_spec, const Vector& mean_params,
                         const std::vector<MeanSample>& batch) {
  if (batch.empty()) throw std::invalid_argument("mean_net_grad: empty batch");
  Matrix inputs(mean_spec.input_dim(), batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) inputs.col(i) = batch[i].input;
  const Matrix predictions = nn::forward_batch(mean_spec, mean_params, inputs);

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  Matrix out_grads(mean_spec.output_dim(), batch.size());
  GradResult result;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Vector diff = predictions.col(i) - batch[i].label;
    result.loss += diff.squaredNorm() * inv_n;
    out_grads.col(i) = 2.0 * diff * inv_n;
  }
  result.grad = nn::backward_batch(mean_spec, mean_params, inputs, out_grads).param_grad;
  return result;
}

ActorCritic ActorCritic::fresh(const nn::MlpSpec& actor_spec, const nn::MlpSpec& critic_spec,
                               std::uint64_t seed) {
  ActorCritic nets;
  nets.actor_spec = actor_spec;
  nets.critic_spec = critic_spec;
  nets.actor = nn::init_params(actor_spec, mix_seed(seed, 0));
  nets.critic = nn::init_params(critic_spec, mix_seed(seed, 1));
  nets.critic_target = nets.critic;
  nets.actor_opt = nn::AdamState::zeros(nets.actor.size());
  nets.critic_opt = nn::AdamState::zeros(nets.critic.size());
  return nets;
}

MeanNet MeanNet::fresh(const nn::MlpSpec& spec, std::uint64_t seed) {
  MeanNet net;
  net.spec = spec;
  net.params = nn::init_params(spec, seed);
  net.opt = nn::AdamState::zeros(net.params.size());
  return net;
}

double critic_update(ActorCritic& nets, const std::vector<const Transition*>& batch, double gamma,
                     double learning_rate, int target_refresh, Rng& rng) {
  std::vector<double> targets;
  targets.reserve(batch.size());
  for (const Transition* tr : batch) {
    targets.push_back(
        td_target(*tr, nets.actor_spec, nets.actor, nets.critic_spec, nets.critic_target, gamma,
                  rng));
  }
  const GradResult result = critic_grad(nets.critic_spec, nets.critic, batch, targets);
  if (std::isfinite(result.loss)) {
    nn::adam_step(nets.critic, result.grad, nets.critic_opt, learning_rate);
    if (++nets.updates_since_refresh >= target_refresh) nets.refresh_target();
  }
  return result.loss;
}

double actor_update(ActorCritic& nets, const std::vector<const Transition*>& batch,
                    double entropy_weight, double learning_rate) {
  std::vector<double> advantages;
  advantages.reserve(batch.size());
  for (const Transition* tr : batch) {
    advantages.push_back(
        advantage(*tr, nets.actor_spec, nets.actor, nets.critic_spec, nets.critic));
  }
  const GradResult result =
      actor_grad(nets.actor_spec, nets.actor, batch, advantages, entropy_weight);
  if (std::isfinite(result.loss)) {
    nn::adam_step(nets.actor, result.grad, nets.actor_opt, learning_rate);
  }
  return result.loss;
}

double mean_net_update(MeanNet& net, const std::vector<MeanSample>& batch, double learning_rate) {
  const GradResult result = mean_net_grad(net.spec, net.params, batch);
  if (std::isfinite(result.loss)) {
    nn::adam_step(net.params, result.grad, net.opt, learning_rate);
  }
  return result.loss;
}

}  // namespace pcmas::mfac
