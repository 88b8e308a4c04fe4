#pragma once

#include <vector>

#include "pcmas/env.hpp"
#include "pcmas/types.hpp"

namespace pcmas::mfac {

/// One decision point of one agent. Rewards cover the span until the agent's
/// next decision (nothing accrues mid-trip), so chaining transitions per
/// agent telescopes to the episode return under gamma = 1.
struct Transition {
  Vector observation;
  int action = 0;
  Vector mean_action;       // true mean action at the decision, recorded post hoc
  double reward = 0;
  Vector next_observation;  // at the agent's next decision (or episode end)
  Vector next_mean_action;
  bool terminal = false;
  env::AgentType agent_type = env::AgentType::kUncontrollable;
  double nc_frac = 0;       // context the episode was generated for
  double alpha = 0;
  int prev_action = -1;     // decision-time input of the mean action network
  int agent_id = -1;        // audit field; updates never read it
};

/// Bounded FIFO with uniform without-replacement batch sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition transition);
  std::size_t size() const { return store_.size(); }
  std::size_t capacity() const { return capacity_; }

  /// Up to `batch_size` distinct transitions; fewer when the buffer is small.
  std::vector<const Transition*> sample(std::size_t batch_size, Rng& rng) const;

  const Transition& at(std::size_t i) const { return store_[i]; }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;  // ring position once full
  std::vector<Transition> store_;
};

}  // namespace pcmas::mfac
