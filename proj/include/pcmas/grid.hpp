#pragma once

#include <cstdlib>

namespace pcmas::data {

/// Flat rectangular cell grid anchored at a southwest origin, laid over an
/// equirectangular local projection. Row index grows northward, column index
/// eastward.
struct GridSpec {
  double origin_lon = -73.99;
  double origin_lat = 40.68;
  int rows = 7;
  int cols = 5;
  double cell_km = 2.0;

  int cell_count() const { return rows * cols; }
  bool operator==(const GridSpec&) const = default;
};

inline constexpr int kOutOfBounds = -1;

int cell_index(const GridSpec& grid, int row, int col);
int cell_row(const GridSpec& grid, int cell);
int cell_col(const GridSpec& grid, int cell);

/// Local east/north offsets in km of a point relative to the grid origin.
void project(const GridSpec& grid, double lon, double lat, double* east_km, double* north_km);

/// Cell index containing the point, or kOutOfBounds.
int to_cell(const GridSpec& grid, double lon, double lat);

inline int manhattan(const GridSpec& grid, int a, int b) {
  return std::abs(cell_row(grid, a) - cell_row(grid, b)) +
         std::abs(cell_col(grid, a) - cell_col(grid, b));
}

}  // namespace pcmas::data
