#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pcmas/checkpoint.hpp"
#include "pcmas/context.hpp"
#include "pcmas/grid.hpp"
#include "pcmas/replay.hpp"
#include "pcmas/updates.hpp"

namespace pcmas::training {

/// Network widths of the full system. Target networks end in the 5-way
/// action head; hypernetwork generators end in the flat parameter vector of
/// their target.
struct ArchitectureTable {
  std::vector<int> actor_target_hidden{32, 16, 18};
  std::vector<int> critic_target_hidden{64, 32, 16};
  std::vector<int> actor_hyper_hidden{128, 64};
  std::vector<int> critic_hyper_hidden{128, 128};
  std::vector<int> mean_hidden{32, 16, 8};

  bool operator==(const ArchitectureTable&) const = default;
};

enum class SystemKind {
  kHypernet,       // ours: per-type actor/critic generated from (n_c/N, alpha)
  kTarget,         // plain target nets, state-only input
  kAugTarget,      // plain target nets, input augmented with the context
  kTargetLarge,    // kTarget widened to the hypernet parameter budget
  kAugTargetLarge  // kAugTarget widened likewise
};

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& name);
/// Row labels of the parameter-count report.
std::string report_label(SystemKind kind);

/// Sample indices of one batch grouped by their episode context.
struct ContextGroups {
  std::vector<GameContext> contexts;            // distinct contexts
  std::vector<int> group_of_sample;             // batch index -> contexts index
  std::vector<std::vector<int>> samples_of_group;
};

/// Groups by exact (n_c, alpha); `collapse` ignores the context and yields a
/// single group, which is what context-independent systems want.
ContextGroups group_by_context(const std::vector<const mfac::Transition*>& batch, int total_agents,
                               bool collapse);

/// Per-distinct-context parameter vectors, aligned with
/// ContextGroups::contexts.
struct GeneratedParams {
  std::vector<Vector> actor;
  std::vector<Vector> critic;
  std::vector<Vector> critic_target;
};

/// A trainable pair of per-type actor/critic policies conditioned (or not)
/// on the game context. The hypernetwork system generates target parameters
/// per context; the baseline systems store them directly.
class PolicySystem {
 public:
  virtual ~PolicySystem() = default;

  virtual SystemKind kind() const = 0;
  /// Whether observations fed to the nets carry the appended context.
  virtual bool context_in_observation() const = 0;
  /// Whether generated parameters vary with the context (drives grouping).
  virtual bool context_dependent_params() const = 0;

  virtual const nn::MlpSpec& actor_spec() const = 0;
  virtual const nn::MlpSpec& critic_spec() const = 0;

  virtual GeneratedParams generate(env::AgentType type,
                                   const std::vector<GameContext>& contexts) const = 0;
  /// Convenience single-context accessors for rollouts.
  Vector actor_params(env::AgentType type, const GameContext& ctx) const;
  Vector critic_params(env::AgentType type, const GameContext& ctx) const;

  /// One TD step from precomputed targets; returns the mean squared TD error
  /// (non-finite losses leave parameters untouched).
  virtual double critic_update(env::AgentType type,
                               const std::vector<const mfac::Transition*>& batch,
                               const ContextGroups& groups, const GeneratedParams& generated,
                               const std::vector<double>& targets, double learning_rate) = 0;

  /// One policy-gradient step from precomputed advantages.
  virtual double actor_update(env::AgentType type,
                              const std::vector<const mfac::Transition*>& batch,
                              const ContextGroups& groups, const GeneratedParams& generated,
                              const std::vector<double>& advantages, double entropy_weight,
                              double learning_rate) = 0;

  virtual std::int64_t learnable_params() const = 0;

  virtual void save(io::BinaryWriter& w) const = 0;
  virtual void load(io::BinaryReader& r) = 0;
};

/// Builds a fresh system of the requested kind. Large variants widen their
/// hidden layers until the total learnable-parameter count lands within
/// `large_tolerance` of the hypernetwork system under the same table
/// (reported via learnable_params() either way).
std::unique_ptr<PolicySystem> make_policy_system(SystemKind kind, const data::GridSpec& grid,
                                                 int total_agents, const ArchitectureTable& arch,
                                                 int critic_target_refresh, std::uint64_t seed,
                                                 double large_tolerance = 0.02);

/// Reads back a system written by PolicySystem::save (kind tag included).
std::unique_ptr<PolicySystem> load_policy_system(io::BinaryReader& r);
void save_policy_system(io::BinaryWriter& w, const PolicySystem& system);

/// The mean-action network spec for a system's observation layout.
nn::MlpSpec mean_net_spec(const data::GridSpec& grid, bool context_in_observation,
                          const ArchitectureTable& arch);

/// Closed-form count of the hypernetwork system's learnable parameters.
std::int64_t hypernet_system_params(const data::GridSpec& grid, const ArchitectureTable& arch);

/// Hidden layout of the Large baselines: every width scaled by `scale`.
std::vector<int> scale_hidden(const std::vector<int>& hidden, double scale);

}  // namespace pcmas::traininging
