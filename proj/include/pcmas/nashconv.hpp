#pragma once

#include "pcmas/best_response.hpp"

namespace pcmas::eval {

struct NashConvRow {
  GameContext ctx;
  env::AgentType type = env::AgentType::kUncontrollable;
  std::uint64_t seed = 0;
  double br_value = 0;   // mean served fare of the representative under BR
  double pop_value = 0;  // mean served fare of the type under population play
  double nashconv = 0;   // br_value - pop_value
  double br_se = 0;
  double pop_se = 0;
  std::int64_t br_episodes = 0;
  int eval_runs = 0;
};

struct NashConvConfig {
  std::vector<GameContext> grid;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int eval_runs = 100;
  BrConfig br;
};

struct NashConvReport {
  std::vector<NashConvRow> rows;
  std::uint64_t bundle_hash = 0;
};

/// Evaluates one (context, type) pair with an explicit best-response actor:
/// `eval_runs` deviation episodes for the representative's served fare and
/// `eval_runs` pure-population episodes (paired seeds) for the type average.
NashConvRow evaluate_context(const TrainedBundle& bundle, const data::DemandModel& demand,
                             const GameContext& ctx, env::AgentType type,
                             const nn::MlpSpec& br_actor_spec, const Vector& br_actor,
                             int eval_runs, std::uint64_t seed);

/// Full estimator: per context, type and seed, trains a best response
/// against the frozen population and reports the served-fare gap. Types with
/// no population at a context are skipped. Grid cells run in parallel.
NashConvReport nashconv(const TrainedBundle& bundle, const data::DemandModel& demand,
                        const NashConvConfig& config, int workers = 1);

}  // namespace pcmas::eval
