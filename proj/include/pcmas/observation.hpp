#pragma once

#include <vector>

#include "pcmas/env.hpp"
#include "pcmas/grid.hpp"
#include "pcmas/types.hpp"

namespace pcmas::mfac {

/// Observation layout: cell one-hot (rows*cols), normalized time, and, when
/// the policy system consumes the design variables, the appended context
/// (n_c / N, alpha).
int observation_dim(const data::GridSpec& grid, bool include_context);

Vector observe(const data::GridSpec& grid, int cell, int t, int horizon, double nc_frac,
               double alpha, bool include_context = true);

Vector uniform_mean_action();

Vector action_one_hot(int action);  // -1 gives the all-zero vector

/// Empirical mean actions for every acting agent: average one-hot action of
/// the other idle agents sharing its cell, uniform when it is alone.
/// `cells` and `actions` are aligned with the acting agents.
std::vector<Vector> true_mean_actions(const std::vector<int>& cells,
                                      const std::vector<int>& actions);

}  // namespace pcmas::mfac
