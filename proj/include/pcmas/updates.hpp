#pragma once

#include <vector>

#include "pcmas/adam.hpp"
#include "pcmas/mlp.hpp"
#include "pcmas/replay.hpp"

namespace pcmas::mfac {

/// Actor and critic inputs are observation (+) mean action; the critic emits
/// one value per action.
Vector policy_input(const Vector& observation, const Vector& mean_action);

Vector policy_probs(const nn::MlpSpec& actor_spec, const Vector& actor_params,
                    const Vector& observation, const Vector& mean_action);

Vector q_values(const nn::MlpSpec& critic_spec, const Vector& critic_params,
                const Vector& observation, const Vector& mean_action);

double q_value(const nn::MlpSpec& critic_spec, const Vector& critic_params,
               const Vector& observation, int action, const Vector& mean_action);

/// The mean action network consumes observation (+) own-action one-hot and
/// emits a distribution over actions.
Vector predict_mean_action(const nn::MlpSpec& mean_spec, const Vector& mean_params,
                           const Vector& observation, const Vector& own_action_one_hot);

int sample_action(const Vector& probs, Rng& rng);

/// r + gamma * Q_target(o', a' ~ pi, mean') for non-terminal transitions,
/// plain r at terminal ones.
double td_target(const Transition& tr, const nn::MlpSpec& actor_spec, const Vector& actor_params,
                 const nn::MlpSpec& critic_spec, const Vector& critic_target_params, double gamma,
                 Rng& rng);

/// Advantage under the current policy: Q(o, a, mean) minus the
/// policy-weighted average of Q over actions. Treated as a constant in the
/// actor loss.
double advantage(const Transition& tr, const nn::MlpSpec& actor_spec, const Vector& actor_params,
                 const nn::MlpSpec& critic_spec, const Vector& critic_params);

struct GradResult {
  Vector grad;       // summed over the batch
  double loss = 0;   // mean per-sample loss
};

/// Squared TD error against precomputed targets.
GradResult critic_grad(const nn::MlpSpec& critic_spec, const Vector& critic_params,
                       const std::vector<const Transition*>& batch,
                       const std::vector<double>& targets);

/// Policy-gradient loss -mean(log pi(a) * A) - entropy_weight * mean(H(pi))
/// with precomputed advantages, so the gradient is exact for the reported
/// scalar.
GradResult actor_grad(const nn::MlpSpec& actor_spec, const Vector& actor_params,
                      const std::vector<const Transition*>& batch,
                      const std::vector<double>& advantages, double entropy_weight);

struct MeanSample {
  Vector input;  // observation (+) decision-time own-action one-hot
  Vector label;  // true mean action
};

/// Mean squared distance (1/n) sum ||label - prediction||^2.
GradResult mean_net_grad(const nn::MlpSpec& mean_spec, const Vector& mean_params,
                         const std::vector<MeanSample>& batch);

/// A directly parameterized actor-critic (best-response training and the
/// non-hypernetwork baselines).
struct ActorCritic {
  nn::MlpSpec actor_spec;
  nn::MlpSpec critic_spec;
  Vector actor;
  Vector critic;
  Vector critic_target;
  nn::AdamState actor_opt;
  nn::AdamState critic_opt;
  int updates_since_refresh = 0;

  static ActorCritic fresh(const nn::MlpSpec& actor_spec, const nn::MlpSpec& critic_spec,
                           std::uint64_t seed);
  void refresh_target() {
    critic_target = critic;
    updates_since_refresh = 0;
  }
};

struct MeanNet {
  nn::MlpSpec spec;
  Vector params;
  nn::AdamState opt;

  static MeanNet fresh(const nn::MlpSpec& spec, std::uint64_t seed);
};

/// One TD step; refreshes the target copy every `target_refresh` updates.
/// Returns the mean TD loss (skipping the step if it is not finite).
double critic_update(ActorCritic& nets, const std::vector<const Transition*>& batch, double gamma,
                     double learning_rate, int target_refresh, Rng& rng);

double actor_update(ActorCritic& nets, const std::vector<const Transition*>& batch,
                    double entropy_weight, double learning_rate);

double mean_net_update(MeanNet& net, const std::vector<MeanSample>& batch, double learning_rate);

}  // namespace pcmas::mfac
