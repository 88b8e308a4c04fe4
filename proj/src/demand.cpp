#include "pcmas/demand.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace pcmas::data {

double DemandModel::total_rate() const {
  double sum = 0;
  for (const DemandBin& b : bins) sum += b.rate;
  return sum;
}

double DemandModel::total_rate_at(int t) const {
  double sum = 0;
  for (int cell = 0; cell < grid.cell_count(); ++cell) sum += bin(t, cell).rate;
  return sum;
}

double DemandModel::mean_fare() const {
  double fares = 0;
  std::size_t count = 0;
  for (const DemandBin& b : bins) {
    for (const auto& [dest, fare] : b.pool) {
      (void)dest;
      fares += fare;
      ++count;
    }
  }
  return count == 0 ? 0.0 : fares / static_cast<double>(count);
}

DemandModel DemandModel::zeros(const GridSpec& grid, int horizon) {
  DemandModel model;
  model.grid = grid;
  model.horizon = horizon;
  model.bins.resize(static_cast<std::size_t>(horizon) * grid.cell_count());
  return model;
}

DemandModel build_demand(const std::vector<TripRecord>& trips, const GridSpec& grid,
                         int bin_minutes, double scale, int window_start_minute, int horizon,
                         BuildStats* stats) {
  DemandModel model = DemandModel::zeros(grid, horizon);
  model.bin_minutes = bin_minutes;
  model.window_start_minute = window_start_minute;
  model.scale = scale;

  BuildStats local;
  local.candidate_trips = trips.size();
  local.empty_input = trips.empty();

  std::set<std::int64_t> days;
  for (const TripRecord& trip : trips) {
    const int origin = to_cell(grid, trip.pickup_lon, trip.pickup_lat);
    const int dest = to_cell(grid, trip.dropoff_lon, trip.dropoff_lat);
    if (origin == kOutOfBounds || dest == kOutOfBounds) {
      ++local.out_of_zone;
      continue;
    }
    const int t = (minute_of_day(trip.pickup_time) - window_start_minute) / bin_minutes;
    if (t < 0 || t >= horizon) {
      ++local.out_of_zone;
      continue;
    }
    ++local.in_zone;
    days.insert(civil_date(trip.pickup_time));
    model.bin(t, origin).pool.emplace_back(dest, trip.fare);
  }
  local.distinct_days = days.size();

  if (!days.empty()) {
    const double per_day = 1.0 / static_cast<double>(days.size());
    for (DemandBin& b : model.bins) {
      b.rate = static_cast<double>(b.pool.size()) * per_day * scale;
    }
  }
  if (stats != nullptr) *stats = local;
  return model;
}

std::vector<Order> sample_orders(const DemandModel& model, int t, Rng& rng) {
  if (t < 0 || t >= model.horizon) {
    throw std::invalid_argument("sample_orders: timestep " + std::to_string(t) +
                                " outside horizon " + std::to_string(model.horizon));
  }
  std::vector<Order> orders;
  for (int cell = 0; cell < model.grid.cell_count(); ++cell) {
    const DemandBin& bin = model.bin(t, cell);
    if (bin.rate <= 0.0 || bin.pool.empty()) continue;
    std::poisson_distribution<int> count_dist(bin.rate);
    const int count = count_dist(rng);
    if (count <= 0) continue;
    std::uniform_int_distribution<std::size_t> pick(0, bin.pool.size() - 1);
    for (int i = 0; i < count; ++i) {
      const auto& [dest, fare] = bin.pool[pick(rng)];
      orders.push_back(Order{cell, dest, fare, t});
    }
  }
  return orders;
}

DemandModel synthetic_demand(const GridSpec& grid, int horizon,
                             const std::vector<SyntheticCell>& cells) {
  DemandModel model = DemandModel::zeros(grid, horizon);
  model.scale = 1.0;
  for (const SyntheticCell& c : cells) {
    if (c.cell < 0 || c.cell >= grid.cell_count()) {
      throw std::invalid_argument("synthetic_demand: cell out of range");
    }
    for (const auto& [dest, fare] : c.pool) {
      if (dest < 0 || dest >= grid.cell_count()) {
        throw std::invalid_argument("synthetic_demand: destination out of range");
      }
      (void)fare;
    }
    for (int t = 0; t < horizon; ++t) {
      model.bin(t, c.cell).rate = c.rate;
      model.bin(t, c.cell).pool = c.pool;
    }
  }
  return model;
}

namespace {
constexpr int kDemandFileVersion = 1;
}

void save_demand(const std::string& path, const DemandModel& model) {
  nlohmann::json j;
  j["format"] = "pcmas-demand";
  j["version"] = kDemandFileVersion;
  j["grid"] = {{"origin_lon", model.grid.origin_lon}, {"origin_lat", model.grid.origin_lat},
               {"rows", model.grid.rows},             {"cols", model.grid.cols},
               {"cell_km", model.grid.cell_km}};
  j["horizon"] = model.horizon;
  j["bin_minutes"] = model.bin_minutes;
  j["window_start_minute"] = model.window_start_minute;
  j["scale"] = model.scale;
  nlohmann::json bins = nlohmann::json::array();
  for (int t = 0; t < model.horizon; ++t) {
    for (int cell = 0; cell < model.grid.cell_count(); ++cell) {
      const DemandBin& bin = model.bin(t, cell);
      if (bin.rate == 0.0 && bin.pool.empty()) continue;
      nlohmann::json pool = nlohmann::json::array();
      for (const auto& [dest, fare] : bin.pool) pool.push_back({dest, fare});
      bins.push_back({{"t", t}, {"cell", cell}, {"rate", bin.rate}, {"pool", pool}});
    }
  }
  j["bins"] = bins;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(1) << "\n";
}

DemandModel load_demand(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "pcmas-demand") {
    throw std::runtime_error("not a demand model file: " + path);
  }
  if (j.value("version", -1) != kDemandFileVersion) {
    throw std::runtime_error("unsupported demand model version in " + path);
  }
  GridSpec grid;
  grid.origin_lon = j["grid"]["origin_lon"].get<double>();
  grid.origin_lat = j["grid"]["origin_lat"].get<double>();
  grid.rows = j["grid"]["rows"].get<int>();
  grid.cols = j["grid"]["cols"].get<int>();
  grid.cell_km = j["grid"]["cell_km"].get<double>();

  DemandModel model = DemandModel::zeros(grid, j["horizon"].get<int>());
  model.bin_minutes = j["bin_minutes"].get<int>();
  model.window_start_minute = j["window_start_minute"].get<int>();
  model.scale = j["scale"].get<double>();
  for (const auto& bin_json : j["bins"]) {
    const int t = bin_json["t"].get<int>();
    const int cell = bin_json["cell"].get<int>();
    if (t < 0 || t >= model.horizon || cell < 0 || cell >= grid.cell_count()) {
      throw std::runtime_error("demand model bin out of range in " + path);
    }
    DemandBin& bin = model.bin(t, cell);
    bin.rate = bin_json["rate"].get<double>();
    for (const auto& entry : bin_json["pool"]) {
      bin.pool.emplace_back(entry[0].get<int>(), entry[1].get<double>());
    }
  }
  return model;
}

}  // namespace pcmas::data
