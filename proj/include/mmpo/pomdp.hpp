#pragma once

#include <string>
#include <vector>

#include "mmpo/errors.hpp"

namespace mmpo {

// Distribution over hidden states.  Entries are non-negative and sum to 1
// within 1e-10.
struct BeliefState {
  std::vector<double> probs;
};

// Interaction history.  observations[0] is drawn under the designated
// initial action 0 (the first observation has no preceding agent choice);
// each later observations[i] follows actions[i-1].  A record therefore has
// one more observation than actions once the first observation exists.
struct HistoryRecord {
  std::vector<int> actions;
  std::vector<int> observations;
};

// Exact finite POMDP.  Kernels are dense row-major tables:
//   transition   (s, a, s')   rows over s' sum to 1
//   observation  (s', a, o)   rows over o sum to 1
//   reward       (s, a)
class DiscretePomdp {
 public:
  DiscretePomdp(int num_states, int num_actions, int num_observations,
                std::vector<double> transition, std::vector<double> observation,
                std::vector<double> reward, double discount,
                std::vector<double> initial_belief);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int num_observations() const { return num_observations_; }
  double discount() const { return discount_; }

  double transition(int s, int a, int s2) const {
    return transition_[(static_cast<std::size_t>(s) * num_actions_ + a) * num_states_ + s2];
  }
  double observation(int s2, int a, int o) const {
    return observation_[(static_cast<std::size_t>(s2) * num_actions_ + a) * num_observations_ + o];
  }
  double reward(int s, int a) const {
    return reward_[static_cast<std::size_t>(s) * num_actions_ + a];
  }
  const BeliefState& initial_belief() const { return initial_belief_; }

  const std::vector<double>& transition_table() const { return transition_; }
  const std::vector<double>& observation_table() const { return observation_; }
  const std::vector<double>& reward_table() const { return reward_; }

 private:
  int num_states_;
  int num_actions_;
  int num_observations_;
  std::vector<double> transition_;
  std::vector<double> observation_;
  std::vector<double> reward_;
  double discount_;
  BeliefState initial_belief_;
};

struct FilterResult {
  BeliefState posterior;
  // Predicted probability of the observation under the prior (1/eta).
  double observation_probability;
};

// One Bayesian filter step:
//   b'(s') = eta * O(o | s', a) * sum_s T(s' | s, a) * prior(s)
// Throws ZeroLikelihood when the predicted observation probability
// underflows 1e-300 (the observation is impossible under the prior).
FilterResult belief_update(const DiscretePomdp& pomdp, const BeliefState& prior,
                           int action, int obs);

// Folds belief_update over the history, starting from the initial belief.
// The first observation is consumed with the designated initial action 0.
BeliefState posterior_given_history(const DiscretePomdp& pomdp,
                                    const HistoryRecord& history);

// Plain-text POMDP definition file (JSON document with nested row-major
// kernel arrays).  The parser rejects rows that fail the sum-to-1 invariant.
DiscretePomdp load_pomdp_file(const std::string& path);
void save_pomdp_file(const DiscretePomdp& pomdp, const std::string& path);

}  // namespace mmpo
