#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pcmas/grid.hpp"
#include "pcmas/trips.hpp"
#include "pcmas/types.hpp"

namespace pcmas::data {

/// A passenger request. `request_t` is filled in by the environment when the
/// order is realized during an episode.
struct Order {
  int origin = 0;
  int destination = 0;
  double fare = 0;
  int request_t = 0;
};

/// Empirical arrivals for one (cell, timestep) bin: a Poisson rate plus the
/// pool of observed (destination, fare) outcomes sampled uniformly per order.
struct DemandBin {
  double rate = 0;
  std::vector<std::pair<int, double>> pool;
};

struct DemandModel {
  GridSpec grid;
  int horizon = 21;
  int bin_minutes = 12;
  int window_start_minute = 16 * 60;
  double scale = 1.0 / 60.0;
  std::vector<DemandBin> bins;  // indexed t * cell_count + cell

  const DemandBin& bin(int t, int cell) const { return bins[t * grid.cell_count() + cell]; }
  DemandBin& bin(int t, int cell) { return bins[t * grid.cell_count() + cell]; }

  double total_rate() const;
  double total_rate_at(int t) const;
  /// Pool-weighted mean fare over all bins; 0 for an empty model.
  double mean_fare() const;

  static DemandModel zeros(const GridSpec& grid, int horizon);
};

struct BuildStats {
  std::size_t candidate_trips = 0;
  std::size_t in_zone = 0;
  std::size_t out_of_zone = 0;
  std::size_t distinct_days = 0;
  bool empty_input = false;
};

/// Bins filtered trips into (cell, timestep) arrival rates: mean in-zone
/// trips per observed day, scaled. Trips with either endpoint outside the
/// grid are dropped and counted.
DemandModel build_demand(const std::vector<TripRecord>& trips, const GridSpec& grid,
                         int bin_minutes = 12, double scale = 1.0 / 60.0,
                         int window_start_minute = 16 * 60, int horizon = 21,
                         BuildStats* stats = nullptr);

/// Draws the order arrivals for timestep `t`: Poisson counts per cell, each
/// order's destination and fare taken uniformly from the bin pool.
std::vector<Order> sample_orders(const DemandModel& model, int t, Rng& rng);

/// Hand-set bin description for synthetic models used in tests and studies.
struct SyntheticCell {
  int cell = 0;
  double rate = 0;
  std::vector<std::pair<int, double>> pool;  // destinations and fares
};

/// Builds a model with the same hand-set cells at every timestep.
DemandModel synthetic_demand(const GridSpec& grid, int horizon,
                             const std::vector<SyntheticCell>& cells);

/// Versioned structured-text model files.
void save_demand(const std::string& path, const DemandModel& model);
DemandModel load_demand(const std::string& path);

}  // namespace pcmas::data
