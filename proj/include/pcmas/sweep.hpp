#pragma once

#include <functional>
#include <map>

#include "pcmas/train.hpp"

namespace pcmas::design {

using training::DesignSpace;
using training::GameContext;
using training::TrainedBundle;

struct ObjectiveSpec {
  double k = 0.6;
  double hourly_rate = 0.0;
  int eval_runs = 100;
};

struct CellEval {
  GameContext ctx;
  double mean_objective = 0;
  double std_objective = 0;
  double mean_orr = 0;
  double mean_pr = 0;
  double mean_served_demand = 0;
  double mean_served_fares = 0;
  int eval_runs = 0;
};

/// Mean metrics of `eval_runs` evaluation episodes at one design point.
CellEval simulate_objective(const TrainedBundle& bundle, const data::DemandModel& demand,
                            const GameContext& ctx, const ObjectiveSpec& spec,
                            std::uint64_t seed);

struct SweepGrid {
  std::vector<int> n_c_values;
  std::vector<double> alphas;

  /// n_c fractions in `points` equal steps and alphas likewise.
  static SweepGrid regular(int total_agents, int points_n_c, int points_alpha,
                           const DesignSpace& space);
};

struct SweepResult {
  ObjectiveSpec spec;
  SweepGrid grid;
  std::vector<CellEval> cells;  // n_c-major, alpha-minor
  int argmax_index = -1;
  CellEval baseline;            // the no-intervention cell (n_c = 0, alpha = 0)
  double improvement_abs = 0;   // F* - F_baseline
  double improvement_rel = 0;   // (F* - F_baseline) / |F_baseline|
  std::uint64_t seed = 0;
  std::uint64_t bundle_hash = 0;
};

/// Core search over an arbitrary evaluator; ties prefer the smaller n_c,
/// then the smaller alpha.
SweepResult grid_search_over(const std::function<CellEval(const GameContext&)>& evaluate,
                             const ObjectiveSpec& spec, const SweepGrid& grid);

SweepResult grid_search(const TrainedBundle& bundle, const data::DemandModel& demand,
                        const ObjectiveSpec& spec, const SweepGrid& grid, std::uint64_t seed,
                        int workers = 1);

/// One sweep per (k, hourly rate) scenario over a shared grid and seed.
std::vector<SweepResult> scenario_sweep(const TrainedBundle& bundle,
                                        const data::DemandModel& demand,
                                        const std::vector<double>& ks,
                                        const std::vector<double>& hourly_rates,
                                        const SweepGrid& grid, int eval_runs, std::uint64_t seed,
                                        int workers = 1);

struct UtilityRow {
  int total_agents = 0;
  double fraction = 0;
  int n_c = 0;
  double served_demand_mean = 0;
  double served_demand_se = 0;
  double served_fares_mean = 0;
  double served_fares_se = 0;
  std::vector<double> served_demand_runs;  // paired across fractions
  std::vector<double> served_fares_runs;
};

/// Served demand and fares per (total N, controllable fraction), averaged
/// over the given alphas with seeds paired across fractions.
std::vector<UtilityRow> utility_study(const std::map<int, const TrainedBundle*>& bundles,
                                      const std::vector<double>& fractions,
                                      const std::vector<double>& alphas, int eval_runs,
                                      std::uint64_t seed, int workers = 1);

struct SegmentArm {
  DesignSpace segment;
  double full_objective = 0;       // full-space bundle scored on this segment
  double segmented_objective = 0;  // the segment's own bundle
  std::int64_t segment_episodes = 0;
};

struct SegmentStudyResult {
  std::vector<SegmentArm> segments;
  double full_overall = 0;
  double segmented_overall = 0;
  std::int64_t full_episodes = 0;
  std::int64_t segmented_episodes_total = 0;
};

/// Trains one full-design-space system against four quadrant specialists on
/// an equal total episode budget, then scores each arm on per-segment grids.
SegmentStudyResult segment_study(const training::TrainSetup& setup,
                                 const training::TrainConfig& base_config,
                                 const data::DemandModel& demand, std::int64_t total_budget,
                                 const ObjectiveSpec& spec, int grid_points_per_axis,
                                 std::uint64_t seed, int workers = 1);

/// Quadrants of a design space, split at the midpoints.
std::vector<DesignSpace> quadrant_segments(const DesignSpace& space);

}  // namespace pcmas::design
