#include "mmpo/advantage.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mmpo {

double sub_trajectory_reward(double be_value, double outcome, double alpha) {
  if (be_value < 0.0) {
    throw std::invalid_argument("sub_trajectory_reward: negative belief entropy");
  }
  // sigmoid(-h) = 1 / (1 + exp(h))
  return alpha / (1.0 + std::exp(be_value)) + outcome;
}

std::vector<double> group_advantages(std::span<const double> rewards_at_depth,
                                     double std_floor) {
  const int g = static_cast<int>(rewards_at_depth.size());
  if (g < 2) {
    throw GroupTooSmall("group_advantages: need at least 2 rewards, got " +
                        std::to_string(g));
  }
  double mean = 0.0;
  for (double r : rewards_at_depth) mean += r;
  mean /= g;
  double var = 0.0;
  for (double r : rewards_at_depth) var += (r - mean) * (r - mean);
  var /= g;
  const double std = std::sqrt(var);
  std::vector<double> advantages(g, 0.0);
  if (std < std_floor) return advantages;  // degenerate group
  for (int i = 0; i < g; ++i) {
    advantages[i] = (rewards_at_depth[i] - mean) / std;
  }
  return advantages;
}

std::vector<double> turn_level_advantages(std::span<const double> sub_advantages,
                                          int group_size, int num_turns) {
  if (sub_advantages.size() !=
      static_cast<std::size_t>(group_size) * num_turns) {
    throw std::invalid_argument("turn_level_advantages: matrix size mismatch");
  }
  std::vector<double> turn(sub_advantages.size(), 0.0);
  for (int i = 0; i < group_size; ++i) {
    const std::size_t row = static_cast<std::size_t>(i) * num_turns;
    double suffix_sum = 0.0;
    for (int t = num_turns - 1; t >= 0; --t) {
      suffix_sum += sub_advantages[row + t];
      turn[row + t] = suffix_sum / (num_turns - t);
    }
  }
  return turn;
}

AdvantageTable build_advantage_table(std::span<const Trajectory> group,
                                     double alpha, double std_floor) {
  const int g = static_cast<int>(group.size());
  if (g < 2) throw GroupTooSmall("build_advantage_table: group too small");
  const int turns = static_cast<int>(group[0].turns.size());
  AdvantageTable table;
  table.group_size = g;
  table.num_turns = turns;
  table.rewards.assign(static_cast<std::size_t>(g) * turns, 0.0);
  table.sub_advantages.assign(table.rewards.size(), 0.0);
  for (int i = 0; i < g; ++i) {
    if (static_cast<int>(group[i].turns.size()) != turns) {
      throw std::invalid_argument("build_advantage_table: ragged group");
    }
    for (int k = 0; k < turns; ++k) {
      table.rewards[table.idx(i, k)] =
          sub_trajectory_reward(group[i].turns[k].belief_entropy.value,
                                group[i].outcome_reward, alpha);
    }
  }
  std::vector<double> depth(g);
  for (int k = 0; k < turns; ++k) {
    for (int i = 0; i < g; ++i) depth[i] = table.rewards[table.idx(i, k)];
    const std::vector<double> adv = group_advantages(depth, std_floor);
    for (int i = 0; i < g; ++i) table.sub_advantages[table.idx(i, k)] = adv[i];
  }
  table.turn_advantages = turn_level_advantages(table.sub_advantages, g, turns);
  return table;
}

SurrogateTerm clipped_surrogate(double turn_adv, double logp_new, double logp_old,
                                double clip_epsilon) {
  if (!(clip_epsilon > 0.0)) {
    throw std::invalid_argument("clipped_surrogate: clip_epsilon must be > 0");
  }
  const double rho = std::exp(logp_new - logp_old);
  const double clipped_rho =
      std::min(std::max(rho, 1.0 - clip_epsilon), 1.0 + clip_epsilon);
  const double unclipped = rho * turn_adv;
  const double clipped = clipped_rho * turn_adv;
  SurrogateTerm term;
  if (unclipped <= clipped) {
    term.objective = unclipped;
    term.gradient_scale = rho * turn_adv;
  } else {
    term.objective = clipped;
    term.gradient_scale = 0.0;
  }
  return term;
}

}  // namespace mmpo
