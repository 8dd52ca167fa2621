#pragma once

#include <span>
#include <vector>

#include "mmpo/agent.hpp"

namespace mmpo {

// Per-group reward and advantage matrices, row-major G x T.
struct AdvantageTable {
  int group_size = 0;
  int num_turns = 0;
  std::vector<double> rewards;          // R_k
  std::vector<double> sub_advantages;   // A-hat_k
  std::vector<double> turn_advantages;  // A_t

  double reward(int i, int k) const { return rewards[idx(i, k)]; }
  double sub(int i, int k) const { return sub_advantages[idx(i, k)]; }
  double turn(int i, int t) const { return turn_advantages[idx(i, t)]; }
  std::size_t idx(int i, int k) const {
    return static_cast<std::size_t>(i) * num_turns + k;
  }
};

// R_k = alpha * sigmoid(-be_value) + outcome; strictly decreasing in the
// entropy value.
double sub_trajectory_reward(double be_value, double outcome, double alpha);

// Group standardization with the population standard deviation; a group
// whose std falls below std_floor is degenerate and gets all-zero advantages.
std::vector<double> group_advantages(std::span<const double> rewards_at_depth,
                                     double std_floor);

// Suffix means per row: A_t = mean of sub-advantages at depths t..T.
std::vector<double> turn_level_advantages(std::span<const double> sub_advantages,
                                          int group_size, int num_turns);

AdvantageTable build_advantage_table(std::span<const Trajectory> group,
                                     double alpha, double std_floor);

struct SurrogateTerm {
  double objective = 0.0;
  // rho * A when the unclipped branch is active, 0 when clipped.
  double gradient_scale = 0.0;
};

SurrogateTerm clipped_surrogate(double turn_adv, double logp_new, double logp_old,
                                double clip_epsilon);

}  // namespace mmpo
