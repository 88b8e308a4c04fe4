#pragma once

#include "pcmas/types.hpp"

namespace pcmas::eval {

/// Two-player bimatrix game: entry (i, j) is the payoff when the row player
/// picks action i and the column player action j.
struct MatrixGame {
  Matrix payoff_row;
  Matrix payoff_col;
};

struct MatrixGameNashConv {
  double row_gain = 0;
  double col_gain = 0;
  double total = 0;
  double row_se = 0;
  double col_se = 0;
  double total_se = 0;
  int row_br_action = -1;
  int col_br_action = -1;
};

/// Sampled best-response-gain estimate mirroring the environment evaluator:
/// a selection phase picks each player's empirical best response against the
/// opponent's sampled play, then a fresh evaluation phase measures the gain
/// as paired differences (best response vs own policy) per opponent draw.
/// Re-evaluation on fresh samples keeps the estimate unbiased at equilibrium.
MatrixGameNashConv matrix_game_nashconv(const MatrixGame& game, const Vector& row_policy,
                                        const Vector& col_policy, int eval_samples, Rng& rng);

}  // namespace pcmas::eval
