#include "pcmas/trips.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace pcmas::data {

namespace {
constexpr std::int64_t kSecondsPerDay = 86400;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::optional<double> parse_double(const std::string& s) {
  const std::string t = trim(s);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

// "YYYY-MM-DD HH:MM:SS"
std::optional<std::int64_t> parse_datetime(const std::string& s) {
  const std::string t = trim(s);
  int y, mo, d, h, mi, se;
  char sep1, sep2, sep3, sep4;
  std::istringstream ss(t);
  ss >> y >> sep1 >> mo >> sep2 >> d >> h >> sep3 >> mi >> sep4 >> se;
  if (!ss || sep1 != '-' || sep2 != '-' || sep3 != ':' || sep4 != ':') return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 ||
      se > 60) {
    return std::nullopt;
  }
  return civil_seconds(y, mo, d, h, mi, se);
}

// "(lon, lat)"
std::optional<std::pair<double, double>> parse_coordinate(const std::string& s) {
  const std::string t = trim(s);
  if (t.size() < 5 || t.front() != '(' || t.back() != ')') return std::nullopt;
  const auto comma = t.find(',');
  if (comma == std::string::npos) return std::nullopt;
  const auto lon = parse_double(t.substr(1, comma - 1));
  const auto lat = parse_double(t.substr(comma + 1, t.size() - comma - 2));
  if (!lon || !lat) return std::nullopt;
  return std::make_pair(*lon, *lat);
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw std::runtime_error("trip file is missing required column '" + name + "'");
  }
  return static_cast<int>(it - header.begin());
}

}  // namespace

std::int64_t civil_seconds(int year, int month, int day, int hour, int minute, int second) {
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{unsigned(month)},
                           std::chrono::day{unsigned(day)}};
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * kSecondsPerDay + hour * 3600 + minute * 60 + second;
}

bool is_weekday(std::int64_t civil) {
  using namespace std::chrono;
  std::int64_t days = civil / kSecondsPerDay;
  if (civil < 0 && civil % kSecondsPerDay != 0) --days;
  const weekday wd{sys_days{std::chrono::days{days}}};
  const unsigned c = wd.c_encoding();  // 0 = Sunday
  return c >= 1 && c <= 5;
}

int minute_of_day(std::int64_t civil) {
  std::int64_t sec = civil % kSecondsPerDay;
  if (sec < 0) sec += kSecondsPerDay;
  return static_cast<int>(sec / 60);
}

std::int64_t civil_date(std::int64_t civil) {
  std::int64_t days = civil / kSecondsPerDay;
  if (civil < 0 && civil % kSecondsPerDay != 0) --days;
  return days;
}

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  int paren_depth = 0;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      continue;
    }
    if (!quoted) {
      if (c == '(') ++paren_depth;
      if (c == ')') --paren_depth;
      if (c == ',' && paren_depth == 0) {
        fields.push_back(trim(current));
        current.clear();
        continue;
      }
    }
    current.push_back(c);
  }
  fields.push_back(trim(current));
  return fields;
}

std::vector<TripRecord> parse_trips(std::istream& in, const TripSchema& schema,
                                    ParseReport* report) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("trip file is empty, expected a header row");
  }
  const std::vector<std::string> header = split_record(line);
  const int c_pickup = find_column(header, schema.pickup_time);
  const int c_dropoff = find_column(header, schema.dropoff_time);
  const int c_pickup_coord = find_column(header, schema.pickup_coordinate);
  const int c_dropoff_coord = find_column(header, schema.dropoff_coordinate);
  const int c_fare = find_column(header, schema.fare);
  const std::size_t min_fields = static_cast<std::size_t>(
      std::max({c_pickup, c_dropoff, c_pickup_coord, c_dropoff_coord, c_fare}) + 1);

  ParseReport local;
  std::vector<TripRecord> trips;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++local.rows;
    const std::vector<std::string> fields = split_record(line);
    if (fields.size() < min_fields) {
      ++local.malformed;
      continue;
    }
    const auto pickup = parse_datetime(fields[c_pickup]);
    const auto dropoff = parse_datetime(fields[c_dropoff]);
    const auto pickup_coord = parse_coordinate(fields[c_pickup_coord]);
    const auto dropoff_coord = parse_coordinate(fields[c_dropoff_coord]);
    const auto fare = parse_double(fields[c_fare]);
    if (!pickup || !dropoff || !pickup_coord || !dropoff_coord || !fare || *fare < 0.0 ||
        *dropoff < *pickup) {
      ++local.malformed;
      continue;
    }
    TripRecord trip;
    trip.pickup_time = *pickup;
    trip.dropoff_time = *dropoff;
    trip.pickup_lon = pickup_coord->first;
    trip.pickup_lat = pickup_coord->second;
    trip.dropoff_lon = dropoff_coord->first;
    trip.dropoff_lat = dropoff_coord->second;
    trip.fare = *fare;
    trips.push_back(trip);
    ++local.parsed;
  }
  if (report != nullptr) *report = local;
  return trips;
}

std::vector<TripRecord> filter_window(const std::vector<TripRecord>& trips, bool weekday_only,
                                      int start_minute, int end_minute) {
  std::vector<TripRecord> kept;
  kept.reserve(trips.size());
  for (const TripRecord& trip : trips) {
    if (weekday_only && !is_weekday(trip.pickup_time)) continue;
    const int minute = minute_of_day(trip.pickup_time);
    if (minute < start_minute || minute >= end_minute) continue;
    kept.push_back(trip);
  }
  return kept;
}

}  // namespace pcmas::data
