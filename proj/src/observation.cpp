#include "pcmas/observation.hpp"

#include <map>
#include <stdexcept>

namespace pcmas::mfac {

int observation_dim(const data::GridSpec& grid, bool include_context) {
  return grid.cell_count() + 1 + (include_context ? 2 : 0);
}

Vector observe(const data::GridSpec& grid, int cell, int t, int horizon, double nc_frac,
               double alpha, bool include_context) {
  if (cell < 0 || cell >= grid.cell_count()) {
    throw std::invalid_argument("observe: cell out of range");
  }
  Vector obs = Vector::Zero(observation_dim(grid, include_context));
  obs[cell] = 1.0;
  obs[grid.cell_count()] = horizon > 0 ? static_cast<double>(t) / horizon : 0.0;
  if (include_context) {
    obs[grid.cell_count() + 1] = nc_frac;
    obs[grid.cell_count() + 2] = alpha;
  }
  return obs;
}

Vector uniform_mean_action() {
  return Vector::Constant(env::kNumActions, 1.0 / env::kNumActions);
}

Vector action_one_hot(int action) {
  Vector v = Vector::Zero(env::kNumActions);
  if (action >= 0) v[action] = 1.0;
  return v;
}

std::vector<Vector> true_mean_actions(const std::vector<int>& cells,
                                      const std::vector<int>& actions) {
  if (cells.size() != actions.size()) {
    throw std::invalid_argument("true_mean_actions: cells/actions size mismatch");
  }
  std::map<int, Vector> cell_sums;
  std::map<int, int> cell_counts;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto [it, inserted] = cell_sums.try_emplace(cells[i], Vector::Zero(env::kNumActions));
    it->second[actions[i]] += 1.0;
    ++cell_counts[cells[i]];
  }
  std::vector<Vector> result(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const int n = cell_counts[cells[i]];
    if (n <= 1) {
      result[i] = uniform_mean_action();
    } else {
      result[i] = (cell_sums[cells[i]] - action_one_hot(actions[i])) / (n - 1);
    }
  }
  return result;
}

}  // namespace pcmas::mfac
