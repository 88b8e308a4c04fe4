#include "pcmas/grid.hpp"

#include <cmath>

namespace pcmas::data {

namespace {
constexpr double kEarthRadiusKm = 6371.0088;
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
}  // namespace

int cell_index(const GridSpec& grid, int row, int col) { return row * grid.cols + col; }
int cell_row(const GridSpec& grid, int cell) { return cell / grid.cols; }
int cell_col(const GridSpec& grid, int cell) { return cell % grid.cols; }

void project(const GridSpec& grid, double lon, double lat, double* east_km, double* north_km) {
  *east_km = kEarthRadiusKm * std::cos(grid.origin_lat * kDegToRad) *
             ((lon - grid.origin_lon) * kDegToRad);
  *north_km = kEarthRadiusKm * ((lat - grid.origin_lat) * kDegToRad);
}

int to_cell(const GridSpec& grid, double lon, double lat) {
  double east = 0.0, north = 0.0;
  project(grid, lon, lat, &east, &north);
  const int col = static_cast<int>(std::floor(east / grid.cell_km));
  const int row = static_cast<int>(std::floor(north / grid.cell_km));
  if (row < 0 || row >= grid.rows || col < 0 || col >= grid.cols) return kOutOfBounds;
  return cell_index(grid, row, col);
}

}  // namespace pcmas::data
