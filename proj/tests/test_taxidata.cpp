#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "pcmas/demand.hpp"
#include "pcmas/grid.hpp"
#include "pcmas/trips.hpp"

using namespace pcmas;
using namespace pcmas::data;

namespace {

const char* kHeader =
    "Pickup datetime, Dropoff datetime, Pickup coordinate, Dropoff coordinate, Fare\n";

// Sample rows from the source dataset. The second row's dropoff date is
// normalized to its pickup day; the raw feed contains rows where the dropoff
// precedes the pickup and those are exercised by the malformed-row tests.
const char* kRow1 =
    "2024-05-03 19:42:37, 2024-05-03 19:48:14, (-73.895073, 40.754677), "
    "(-73.915863, 40.752468), 5.5\n";
const char* kRow2 =
    "2024-05-11 18:57:04, 2024-05-11 19:23:34, (-73.986313, 40.689182), "
    "(-73.989334, 40.630630), 24\n";

std::vector<TripRecord> parse_string(const std::string& text, ParseReport* report = nullptr) {
  std::istringstream in(text);
  return parse_trips(in, TripSchema{}, report);
}

TripRecord weekday_trip(int day, int hour, int minute, double lon, double lat, double fare,
                        double dest_lon, double dest_lat) {
  TripRecord trip;
  trip.pickup_time = civil_seconds(2024, 5, day, hour, minute, 0);
  trip.dropoff_time = trip.pickup_time + 600;
  trip.pickup_lon = lon;
  trip.pickup_lat = lat;
  trip.dropoff_lon = dest_lon;
  trip.dropoff_lat = dest_lat;
  trip.fare = fare;
  return trip;
}

}  // namespace

TEST_CASE("parses the sample rows") {
  ParseReport report;
  const auto trips = parse_string(std::string(kHeader) + kRow1 + kRow2, &report);
  REQUIRE(trips.size() == 2);
  CHECK(report.rows == 2);
  CHECK(report.parsed == 2);
  CHECK(report.malformed == 0);

  CHECK(trips[0].fare == 5.5);
  CHECK(trips[0].pickup_lon == -73.895073);
  CHECK(trips[0].pickup_lat == 40.754677);
  CHECK(trips[0].dropoff_lon == -73.915863);
  CHECK(minute_of_day(trips[0].pickup_time) == 19 * 60 + 42);

  CHECK(trips[1].fare == 24.0);  // integer fare column parses as currency
}

TEST_CASE("dropoff before pickup is malformed") {
  ParseReport report;
  const std::string row =
      "2024-05-11 18:57:04, 2024-05-03 19:23:34, (-73.986313, 40.689182), "
      "(-73.989334, 40.630630), 24\n";
  const auto trips = parse_string(std::string(kHeader) + kRow1 + row, &report);
  CHECK(trips.size() == 1);
  CHECK(report.malformed == 1);
}

TEST_CASE("negative fares and garbage rows are skipped") {
  ParseReport report;
  const std::string bad1 = "2024-05-03 12:00:00, 2024-05-03 12:30:00, (-73.9, 40.7), (-73.9, 40.7), -3\n";
  const std::string bad2 = "not a date, also not, (x, y), (x, y), five\n";
  const std::string bad3 = "2024-05-03 12:00:00, 2024-05-03 12:30:00\n";
  const auto trips = parse_string(std::string(kHeader) + bad1 + kRow1 + bad2 + bad3, &report);
  CHECK(trips.size() == 1);
  CHECK(report.rows == 4);
  CHECK(report.malformed == 3);
}

TEST_CASE("missing required column is a hard error") {
  std::istringstream in("Pickup datetime, Dropoff datetime, Pickup coordinate, Fare\nrow\n");
  CHECK_THROWS_WITH_AS(parse_trips(in, TripSchema{}),
                       doctest::Contains("Dropoff coordinate"), std::runtime_error);
}

TEST_CASE("parsing preserves input order") {
  const auto trips = parse_string(std::string(kHeader) + kRow2 + kRow1);
  REQUIRE(trips.size() == 2);
  CHECK(trips[0].fare == 24.0);
  CHECK(trips[1].fare == 5.5);
}

TEST_CASE("split_record keeps parenthesized commas together") {
  const auto fields = split_record("a, (1, 2), \"x, y\", b");
  REQUIRE(fields.size() == 4);
  CHECK(fields[1] == "(1, 2)");
  CHECK(fields[2] == "x, y");
}

TEST_CASE("window filter keeps weekday evening pickups") {
  std::vector<TripRecord> trips;
  // 2024-05-04 is a Saturday, 2024-05-03 a Friday.
  trips.push_back(weekday_trip(4, 17, 0, -73.95, 40.72, 10, -73.95, 40.72));   // Saturday
  trips.push_back(weekday_trip(3, 19, 59, -73.95, 40.72, 10, -73.95, 40.72));  // in window
  trips.push_back(weekday_trip(3, 20, 0, -73.95, 40.72, 10, -73.95, 40.72));   // boundary, out
  trips.push_back(weekday_trip(3, 15, 59, -73.95, 40.72, 10, -73.95, 40.72));  // too early
  trips.push_back(weekday_trip(3, 16, 0, -73.95, 40.72, 10, -73.95, 40.72));   // boundary, in

  const auto kept = filter_window(trips);
  REQUIRE(kept.size() == 2);
  CHECK(minute_of_day(kept[0].pickup_time) == 19 * 60 + 59);
  CHECK(minute_of_day(kept[1].pickup_time) == 16 * 60);
}

TEST_CASE("grid cell golden mapping") {
  const GridSpec grid;  // default study box, origin (-73.99, 40.68)

  // Origin corner belongs to cell (0, 0).
  CHECK(to_cell(grid, grid.origin_lon, grid.origin_lat) == cell_index(grid, 0, 0));

  // A point about 1 km east and north of the origin stays in cell (0, 0).
  CHECK(to_cell(grid, -73.97817, 40.68899) == cell_index(grid, 0, 0));

  // Golden values for the sample coordinates under the default box,
  // derived from the equirectangular projection with R = 6371.0088 km.
  CHECK(to_cell(grid, -73.895073, 40.754677) == cell_index(grid, 4, 4));  // sample pickup 1
  CHECK(to_cell(grid, -73.915863, 40.752468) == cell_index(grid, 4, 3));  // sample dropoff 1
  CHECK(to_cell(grid, -73.986313, 40.689182) == cell_index(grid, 0, 0));  // sample pickup 2
  CHECK(to_cell(grid, -73.989334, 40.630630) == kOutOfBounds);            // sample dropoff 2

  // The corridor endpoints stay inside the box.
  CHECK(to_cell(grid, -73.8740, 40.7769) != kOutOfBounds);  // airport side
  CHECK(to_cell(grid, -73.9712, 40.7549) != kOutOfBounds);  // midtown side
}

TEST_CASE("points outside the box map out of bounds") {
  const GridSpec grid;
  CHECK(to_cell(grid, grid.origin_lon - 0.01, grid.origin_lat) == kOutOfBounds);
  CHECK(to_cell(grid, grid.origin_lon, grid.origin_lat - 0.01) == kOutOfBounds);
  CHECK(to_cell(grid, -73.80, 40.75) == kOutOfBounds);
  CHECK(to_cell(grid, -73.95, 40.95) == kOutOfBounds);
}

TEST_CASE("build_demand computes per-day scaled rates") {
  const GridSpec grid;
  std::vector<TripRecord> trips;
  // 60 trips in one bin on a single weekday; scale 1/60 gives rate 1.
  for (int i = 0; i < 60; ++i) {
    trips.push_back(weekday_trip(3, 16, 5, -73.97817, 40.68899, 7.5, -73.95, 40.72));
  }
  BuildStats stats;
  const DemandModel model = build_demand(trips, grid, 12, 1.0 / 60.0, 16 * 60, 21, &stats);
  CHECK(stats.in_zone == 60);
  CHECK(stats.distinct_days == 1);
  const int cell = to_cell(grid, -73.97817, 40.68899);
  CHECK(model.bin(0, cell).rate == doctest::Approx(1.0));
  CHECK(model.bin(0, cell).pool.size() == 60);
  CHECK(model.bin(1, cell).rate == 0.0);
  CHECK(model.total_rate() == doctest::Approx(1.0));
}

TEST_CASE("build_demand splits rates across observed days") {
  const GridSpec grid;
  std::vector<TripRecord> trips;
  for (int i = 0; i < 30; ++i) trips.push_back(weekday_trip(3, 17, 1, -73.97817, 40.68899, 5, -73.95, 40.72));
  for (int i = 0; i < 10; ++i) trips.push_back(weekday_trip(6, 17, 1, -73.97817, 40.68899, 5, -73.95, 40.72));
  const DemandModel model = build_demand(trips, grid, 12, 1.0, 16 * 60, 21, nullptr);
  const int cell = to_cell(grid, -73.97817, 40.68899);
  const int t = (17 * 60 + 1 - 16 * 60) / 12;
  CHECK(model.bin(t, cell).rate == doctest::Approx(20.0));  // (30 + 10) / 2 days
}

TEST_CASE("empty input builds a valid all-zero model") {
  BuildStats stats;
  const DemandModel model = build_demand({}, GridSpec{}, 12, 1.0 / 60.0, 16 * 60, 21, &stats);
  CHECK(stats.empty_input);
  CHECK(model.total_rate() == 0.0);
  Rng rng(1);
  CHECK(sample_orders(model, 0, rng).empty());
}

TEST_CASE("out-of-zone endpoints are dropped") {
  const GridSpec grid;
  std::vector<TripRecord> trips;
  trips.push_back(weekday_trip(3, 17, 0, -73.986313, 40.689182, 24, -73.989334, 40.630630));
  BuildStats stats;
  const DemandModel model = build_demand(trips, grid, 12, 1.0, 16 * 60, 21, &stats);
  CHECK(stats.in_zone == 0);
  CHECK(stats.out_of_zone == 1);
  CHECK(model.total_rate() == 0.0);
}

TEST_CASE("sampled orders are deterministic and in bounds") {
  GridSpec grid;
  grid.rows = 3;
  grid.cols = 3;
  const DemandModel model = synthetic_demand(
      grid, 21, {{4, 2.0, {{0, 5.0}, {8, 7.0}}}, {0, 0.5, {{4, 3.0}}}});

  Rng rng_a(42), rng_b(42);
  const auto orders_a = sample_orders(model, 3, rng_a);
  const auto orders_b = sample_orders(model, 3, rng_b);
  REQUIRE(orders_a.size() == orders_b.size());
  for (std::size_t i = 0; i < orders_a.size(); ++i) {
    CHECK(orders_a[i].origin == orders_b[i].origin);
    CHECK(orders_a[i].destination == orders_b[i].destination);
    CHECK(orders_a[i].fare == orders_b[i].fare);
    CHECK(orders_a[i].origin >= 0);
    CHECK(orders_a[i].origin < grid.cell_count());
    CHECK(orders_a[i].destination >= 0);
    CHECK(orders_a[i].destination < grid.cell_count());
    CHECK(orders_a[i].request_t == 3);
  }
}

TEST_CASE("poisson rate 1 bin draws about one order per step") {
  GridSpec grid;
  grid.rows = 2;
  grid.cols = 2;
  const DemandModel model = synthetic_demand(grid, 21, {{1, 1.0, {{0, 4.0}}}});
  Rng rng(7);
  long total = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) total += static_cast<long>(sample_orders(model, 0, rng).size());
  const double mean = static_cast<double>(total) / draws;
  CHECK(mean > 0.95);
  CHECK(mean < 1.05);
}

TEST_CASE("demand model file round trip") {
  GridSpec grid;
  grid.rows = 3;
  grid.cols = 3;
  const DemandModel model = synthetic_demand(grid, 5, {{4, 1.25, {{0, 5.5}, {8, 7.25}}}});
  const std::string path =
      (std::filesystem::temp_directory_path() / "pcmas_demand.json").string();
  save_demand(path, model);
  const DemandModel loaded = load_demand(path);
  CHECK(loaded.grid == model.grid);
  CHECK(loaded.horizon == model.horizon);
  CHECK(loaded.scale == model.scale);
  REQUIRE(loaded.bins.size() == model.bins.size());
  for (std::size_t i = 0; i < model.bins.size(); ++i) {
    CHECK(loaded.bins[i].rate == model.bins[i].rate);
    CHECK(loaded.bins[i].pool == model.bins[i].pool);
  }
  std::remove(path.c_str());
}

TEST_CASE("demand loader rejects wrong version") {
  const std::string path = (std::filesystem::temp_directory_path() / "pcmas_wrong.json").string();
  {
    std::ofstream out(path);
    out << R"({"format":"pcmas-demand","version":999,"bins":[]})";
  }
  CHECK_THROWS(load_demand(path));
  std::remove(path.c_str());
}
