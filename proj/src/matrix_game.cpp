#include "pcmas/matrix_game.hpp"

#include <cmath>
#include <stdexcept>

namespace pcmas::eval {

namespace {

int sample_index(const Vector& policy, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  for (int i = 0; i < policy.size(); ++i) {
    u -= policy[i];
    if (u <= 0.0) return i;
  }
  return static_cast<int>(policy.size()) - 1;
}

struct Gain {
  double mean;
  double se;
  int br_action;
};

// `payoff(own, opp)` read from a matrix oriented for this player.
Gain one_side(const Matrix& payoff, const Vector& own, const Vector& opp, int eval_samples,
              Rng& rng) {
  const int n_own = static_cast<int>(payoff.rows());

  // Selection: empirical action values against sampled opponent play.
  Vector totals = Vector::Zero(n_own);
  for (int s = 0; s < eval_samples; ++s) {
    totals += payoff.col(sample_index(opp, rng));
  }
  int br = 0;
  totals.maxCoeff(&br);

  // Evaluation on fresh draws, paired per opponent sample.
  double sum = 0, sum_sq = 0;
  for (int s = 0; s < eval_samples; ++s) {
    const int j = sample_index(opp, rng);
    const double diff = payoff(br, j) - payoff(sample_index(own, rng), j);
    sum += diff;
    sum_sq += diff * diff;
  }
  const double n = static_cast<double>(eval_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  return Gain{mean, std::sqrt(var / n), br};
}

}  // namespace

MatrixGameNashConv matrix_game_nashconv(const MatrixGame& game, const Vector& row_policy,
                                        const Vector& col_policy, int eval_samples, Rng& rng) {
  if (game.payoff_row.rows() != row_policy.size() ||
      game.payoff_row.cols() != col_policy.size() ||
      game.payoff_col.rows() != game.payoff_row.rows() ||
      game.payoff_col.cols() != game.payoff_row.cols()) {
    throw std::invalid_argument("matrix game shapes are inconsistent");
  }
  if (eval_samples < 2) throw std::invalid_argument("need at least 2 evaluation samples");

  const Gain row = one_side(game.payoff_row, row_policy, col_policy, eval_samples, rng);
  // The column player's payoff viewed as payoff(own action, opponent action).
  const Gain col =
      one_side(game.payoff_col.transpose(), col_policy, row_policy, eval_samples, rng);

  MatrixGameNashConv out;
  out.row_gain = row.mean;
  out.col_gain = col.mean;
  out.total = row.mean + col.mean;
  out.row_se = row.se;
  out.col_se = col.se;
  out.total_se = std::sqrt(row.se * row.se + col.se * col.se);
  out.row_br_action = row.br_action;
  out.col_br_action = col.br_action;
  return out;
}

}  // namespace pcmas::eval
