#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "pcmas/demand.hpp"
#include "pcmas/grid.hpp"
#include "pcmas/types.hpp"

namespace pcmas::env {

using data::DemandModel;
using data::GridSpec;
using data::Order;

inline constexpr int kNumActions = 5;
enum Action : int { kStay = 0, kNorth = 1, kSouth = 2, kEast = 3, kWest = 4 };

enum class AgentType { kControllable, kUncontrollable };

struct Composition {
  int n_u = 0;
  int n_c = 0;
  int total() const { return n_u + n_c; }
};

struct RewardParams {
  double alpha = 0.0;            // penalty strength in [0, 1]
  double synthetic_fare_c = 0.0; // constant fare credited to controllable matches
  double hourly_rate = 0.0;      // hiring cost per controllable agent per hour
};

struct DriverState {
  int id = 0;
  AgentType type = AgentType::kUncontrollable;
  int cell = 0;
  int remaining_steps = 0;  // 0 while idle
  int trip_destination = data::kOutOfBounds;

  bool idle() const { return remaining_steps == 0; }
};

struct Metrics {
  double orr = 0;
  double pr = 0;
  std::int64_t served_demand = 0;
  double served_fares = 0;
  std::int64_t total_requests = 0;
  double total_fares = 0;
  double hiring_cost = 0;
  double objective = 0;  // filled by callers that know k
};

/// Demand-to-supply ratio of one cell at matching time; +infinity marks a
/// cell with no idle supply (no charge applies there).
double demand_supply_ratio(int order_count, int idle_driver_count);

/// Service charge on oversupplied cells: alpha * (1 - DS) for DS <= 1,
/// otherwise zero.
double service_charge(double alpha, double ds);

double reward_of_match(AgentType type, double order_fare, double alpha, double synthetic_fare,
                       double ds);

/// Uniformly random pairing of idle drivers and orders in one cell; produces
/// min(#drivers, #orders) pairs.
std::vector<std::pair<int, int>> match_cell(const std::vector<int>& driver_ids,
                                            const std::vector<int>& order_ids, Rng& rng);

double objective(const Metrics& metrics, double k);

/// Movement on the grid with off-edge moves clamped to stay.
int apply_action(const GridSpec& grid, int cell, Action action);

struct DriverEvent {
  int t;
  int driver_id;
  AgentType type;
  int cell_before;
  int action;        // -1 for occupied drivers advancing a trip
  int cell_after;
  int matched_order; // index into the step's order list, -1 if unmatched
  double reward;
};

struct OrderEvent {
  int t;
  int origin;
  int destination;
  double fare;
  bool served;
};

struct EpisodeLog {
  std::vector<DriverEvent> driver_events;
  std::vector<OrderEvent> order_events;
};

Metrics episode_metrics(const EpisodeLog& log, const Composition& composition,
                        const RewardParams& params, double episode_hours = 4.0);

/// Delimited event rows for debugging and metric recomputation.
void write_event_log(std::ostream& out, const EpisodeLog& log);

struct StepResult {
  std::vector<double> rewards;       // indexed by driver id; non-actors get 0
  std::vector<Order> orders;         // the step's arrivals
  std::vector<int> matched_driver;   // per order: driver id or -1
};

/// The repositioning game. One instance is single-threaded and owns its RNG;
/// run several instances for parallel rollouts.
class Environment {
 public:
  Environment(const GridSpec& grid, const DemandModel* demand, Composition composition,
              RewardParams reward_params, int horizon = 21);

  /// Places drivers proportionally to the demand rate at t=0 (uniform when
  /// the model is silent) and clears the clock.
  void reset(std::uint64_t seed);

  /// Advances one timestep. `joint_actions` must hold one entry per driver;
  /// entries of occupied drivers are ignored. Order of effects: idle drivers
  /// move and trips advance, new orders arrive, per-cell matching at the
  /// post-movement supply, rewards, unmatched orders expire.
  StepResult step(const std::vector<Action>& joint_actions);

  int t() const { return t_; }
  int horizon() const { return horizon_; }
  bool done() const { return t_ >= horizon_; }
  const GridSpec& grid() const { return grid_; }
  const Composition& composition() const { return composition_; }
  const RewardParams& reward_params() const { return reward_params_; }
  const std::vector<DriverState>& drivers() const { return drivers_; }
  const EpisodeLog& log() const { return log_; }

  /// Ids of drivers that act this step (idle at the start of the step).
  std::vector<int> acting_drivers() const;

  Metrics metrics(double episode_hours = 4.0) const;

 private:
  GridSpec grid_;
  const DemandModel* demand_;
  Composition composition_;
  RewardParams reward_params_;
  int horizon_;
  int t_ = 0;
  std::vector<DriverState> drivers_;
  EpisodeLog log_;
  Rng rng_;
};

}  // namespace pcmas::env
