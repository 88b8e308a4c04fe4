#include "pcmas/env.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>

namespace pcmas::env {

double demand_supply_ratio(int order_count, int idle_driver_count) {
  if (idle_driver_count <= 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(order_count) / static_cast<double>(idle_driver_count);
}

double service_charge(double alpha, double ds) {
  if (ds <= 1.0) return alpha * (1.0 - ds);
  return 0.0;
}

double reward_of_match(AgentType type, double order_fare, double alpha, double synthetic_fare,
                       double ds) {
  if (type == AgentType::kUncontrollable) return order_fare;
  return synthetic_fare * (1.0 - service_charge(alpha, ds));
}

std::vector<std::pair<int, int>> match_cell(const std::vector<int>& driver_ids,
                                            const std::vector<int>& order_ids, Rng& rng) {
  std::vector<int> drivers = driver_ids;
  std::vector<int> orders = order_ids;
  std::shuffle(drivers.begin(), drivers.end(), rng);
  std::shuffle(orders.begin(), orders.end(), rng);
  const std::size_t n = std::min(drivers.size(), orders.size());
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(drivers[i], orders[i]);
  return pairs;
}

double objective(const Metrics& metrics, double k) {
  return k * metrics.orr + (1.0 - k) * metrics.pr;
}

int apply_action(const GridSpec& grid, int cell, Action action) {
  int row = data::cell_row(grid, cell);
  int col = data::cell_col(grid, cell);
  switch (action) {
    case kStay: break;
    case kNorth: ++row; break;
    case kSouth: --row; break;
    case kEast: ++col; break;
    case kWest: --col; break;
  }
  if (row < 0 || row >= grid.rows || col < 0 || col >= grid.cols) return cell;
  return data::cell_index(grid, row, col);
}

Metrics episode_metrics(const EpisodeLog& log, const Composition& composition,
                        const RewardParams& params, double episode_hours) {
  Metrics m;
  for (const OrderEvent& order : log.order_events) {
    ++m.total_requests;
    m.total_fares += order.fare;
    if (order.served) {
      ++m.served_demand;
      m.served_fares += order.fare;
    }
  }
  m.hiring_cost = params.hourly_rate * composition.n_c * episode_hours;
  m.orr = m.total_requests == 0
              ? 0.0
              : static_cast<double>(m.served_demand) / static_cast<double>(m.total_requests);
  if (m.total_fares > 0.0) {
    m.pr = (m.served_fares - m.hiring_cost) / m.total_fares;
  } else {
    // No fare volume: a costless episode is perfectly profitable, one with
    // hiring spend is not.
    m.pr = m.hiring_cost == 0.0 ? 1.0 : 0.0;
  }
  return m;
}

void write_event_log(std::ostream& out, const EpisodeLog& log) {
  out << "kind,t,driver_id,type,cell_before,action,cell_after,matched_order,reward\n";
  for (const DriverEvent& e : log.driver_events) {
    out << "driver," << e.t << ',' << e.driver_id << ','
        << (e.type == AgentType::kControllable ? 'c' : 'u') << ',' << e.cell_before << ','
        << e.action << ',' << e.cell_after << ',' << e.matched_order << ',' << e.reward << "\n";
  }
  out << "kind,t,origin,destination,fare,served\n";
  for (const OrderEvent& e : log.order_events) {
    out << "order," << e.t << ',' << e.origin << ',' << e.destination << ',' << e.fare << ','
        << (e.served ? 1 : 0) << "\n";
  }
}

Environment::Environment(const GridSpec& grid, const DemandModel* demand, Composition composition,
                         RewardParams reward_params, int horizon)
    : grid_(grid),
      demand_(demand),
      composition_(composition),
      reward_params_(reward_params),
      horizon_(horizon) {
  if (composition.total() <= 0) {
    throw std::invalid_argument("environment needs at least one driver");
  }
  if (composition.n_u < 0 || composition.n_c < 0) {
    throw std::invalid_argument("negative agent counts");
  }
  if (demand_ == nullptr) throw std::invalid_argument("environment needs a demand model");
  if (demand_->horizon < horizon_) {
    throw std::invalid_argument("demand model horizon shorter than episode horizon");
  }
}

void Environment::reset(std::uint64_t seed) {
  rng_.seed(seed);
  t_ = 0;
  log_ = EpisodeLog{};
  drivers_.clear();
  drivers_.reserve(composition_.total());

  // Initial placement follows the demand distribution of the first step.
  std::vector<double> weights(grid_.cell_count(), 0.0);
  double total = 0.0;
  for (int cell = 0; cell < grid_.cell_count(); ++cell) {
    weights[cell] = demand_->bin(0, cell).rate;
    total += weights[cell];
  }
  if (total <= 0.0) std::fill(weights.begin(), weights.end(), 1.0);
  std::discrete_distribution<int> placement(weights.begin(), weights.end());

  for (int i = 0; i < composition_.total(); ++i) {
    DriverState driver;
    driver.id = i;
    driver.type = i < composition_.n_c ? AgentType::kControllable : AgentType::kUncontrollable;
    driver.cell = placement(rng_);
    drivers_.push_back(driver);
  }
}

std::vector<int> Environment::acting_drivers() const {
  std::vector<int> ids;
  for (const DriverState& driver : drivers_) {
    if (driver.idle()) ids.push_back(driver.id);
  }
  return ids;
}

StepResult Environment::step(const std::vector<Action>& joint_actions) {
  if (done()) throw std::logic_error("step called on a finished episode");
  if (joint_actions.size() != drivers_.size()) {
    throw std::invalid_argument("expected " + std::to_string(drivers_.size()) +
                                " actions, got " + std::to_string(joint_actions.size()));
  }

  StepResult result;
  result.rewards.assign(drivers_.size(), 0.0);

  // Movement phase. Drivers idle at the start of the step move (clamped) and
  // stay available for matching; occupied drivers advance their trips and
  // sit out this step's matching even if they arrive now.
  std::vector<int> actors;
  std::vector<std::size_t> event_of_driver(drivers_.size());
  for (DriverState& driver : drivers_) {
    if (driver.idle()) {
      const int before = driver.cell;
      driver.cell = apply_action(grid_, driver.cell, joint_actions[driver.id]);
      actors.push_back(driver.id);
      event_of_driver[driver.id] = log_.driver_events.size();
      log_.driver_events.push_back({t_, driver.id, driver.type, before,
                                    static_cast<int>(joint_actions[driver.id]), driver.cell, -1,
                                    0.0});
    } else {
      const int before = driver.cell;
      if (--driver.remaining_steps == 0) {
        driver.cell = driver.trip_destination;
        driver.trip_destination = data::kOutOfBounds;
      }
      log_.driver_events.push_back(
          {t_, driver.id, driver.type, before, -1, driver.cell, -1, 0.0});
    }
  }

  // Arrivals for this timestep.
  result.orders = data::sample_orders(*demand_, t_, rng_);
  result.matched_driver.assign(result.orders.size(), -1);

  // Per-cell matching at the post-movement supply.
  std::map<int, std::vector<int>> idle_by_cell;
  for (int id : actors) idle_by_cell[drivers_[id].cell].push_back(id);
  std::map<int, std::vector<int>> orders_by_cell;
  for (std::size_t i = 0; i < result.orders.size(); ++i) {
    orders_by_cell[result.orders[i].origin].push_back(static_cast<int>(i));
  }

  std::vector<bool> served(result.orders.size(), false);
  for (const auto& [cell, order_ids] : orders_by_cell) {
    const auto it = idle_by_cell.find(cell);
    const int supply = it == idle_by_cell.end() ? 0 : static_cast<int>(it->second.size());
    const double ds = demand_supply_ratio(static_cast<int>(order_ids.size()), supply);
    if (supply == 0) continue;
    for (const auto& [driver_id, order_id] : match_cell(it->second, order_ids, rng_)) {
      DriverState& driver = drivers_[driver_id];
      const Order& order = result.orders[order_id];
      const double reward = reward_of_match(driver.type, order.fare, reward_params_.alpha,
                                            reward_params_.synthetic_fare_c, ds);
      result.rewards[driver_id] = reward;
      result.matched_driver[order_id] = driver_id;
      served[order_id] = true;
      driver.remaining_steps = std::max(1, data::manhattan(grid_, order.origin, order.destination));
      driver.trip_destination = order.destination;
      DriverEvent& event = log_.driver_events[event_of_driver[driver_id]];
      event.matched_order = order_id;
      event.reward = reward;
    }
  }

  for (std::size_t i = 0; i < result.orders.size(); ++i) {
    const Order& order = result.orders[i];
    log_.order_events.push_back({t_, order.origin, order.destination, order.fare, served[i]});
  }

  ++t_;
  return result;
}

Metrics Environment::metrics(double episode_hours) const {
  return episode_metrics(log_, composition_, reward_params_, episode_hours);
}

}  // namespace pcmas::env
