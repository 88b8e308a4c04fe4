#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pcmas::data {

/// Civil timestamps are stored as seconds since the epoch of their own
/// (zone-free) calendar; the data window logic only needs weekday and
/// time-of-day.
std::int64_t civil_seconds(int year, int month, int day, int hour, int minute, int second);
bool is_weekday(std::int64_t civil);
int minute_of_day(std::int64_t civil);
std::int64_t civil_date(std::int64_t civil);  // days since epoch, identifies the calendar day

struct TripRecord {
  std::int64_t pickup_time = 0;
  std::int64_t dropoff_time = 0;
  double pickup_lon = 0, pickup_lat = 0;
  double dropoff_lon = 0, dropoff_lat = 0;
  double fare = 0;
};

/// Column-name mapping for the delimited trip files. Coordinates are single
/// columns holding "(lon, lat)" pairs.
struct TripSchema {
  std::string pickup_time = "Pickup datetime";
  std::string dropoff_time = "Dropoff datetime";
  std::string pickup_coordinate = "Pickup coordinate";
  std::string dropoff_coordinate = "Dropoff coordinate";
  std::string fare = "Fare";
};

struct ParseReport {
  std::size_t rows = 0;
  std::size_t parsed = 0;
  std::size_t malformed = 0;
};

/// Splits a delimited line on commas that are not nested in parentheses or
/// double quotes, trimming surrounding whitespace.
std::vector<std::string> split_record(const std::string& line);

/// Parses a header + rows stream. Rows that fail to parse or violate the
/// record invariants (negative fare, dropoff before pickup) are counted and
/// skipped. A missing schema column is a hard error.
std::vector<TripRecord> parse_trips(std::istream& in, const TripSchema& schema,
                                    ParseReport* report = nullptr);

/// Keeps trips whose pickup falls on the requested days inside the half-open
/// minute window [start, end). Defaults follow the evening-peak study window.
std::vector<TripRecord> filter_window(const std::vector<TripRecord>& trips,
                                      bool weekday_only = true, int start_minute = 16 * 60,
                                      int end_minute = 20 * 60);

}  // namespace pcmas::data
