// Test-only reference implementations, written directly from the defining
// formulas and independent of the library code paths they check.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "mmpo/enumeration.hpp"
#include "mmpo/pomdp.hpp"
#include "mmpo/policy.hpp"
#include "mmpo/rng.hpp"

namespace oracle {

// Posterior over the final state by brute-force enumeration of all hidden
// state paths s_0..s_n jointly consistent with the history.  The first
// observation uses the designated initial action 0.
inline mmpo::BeliefState brute_posterior(const mmpo::DiscretePomdp& pomdp,
                                         const mmpo::HistoryRecord& history) {
  const int S = pomdp.num_states();
  const std::size_t n = history.observations.size();
  std::vector<double> joint(S, 0.0);  // P(s_n = s, h)
  std::vector<int> path(n + 1, 0);

  std::function<void(std::size_t, double)> recurse = [&](std::size_t depth,
                                                         double weight) {
    if (depth == n + 1) {
      joint[path[n]] += weight;
      return;
    }
    for (int s = 0; s < S; ++s) {
      path[depth] = s;
      double w = weight;
      if (depth == 0) {
        w *= pomdp.initial_belief().probs[s];
      } else {
        const int action = depth == 1 ? 0 : history.actions[depth - 2];
        w *= pomdp.transition(path[depth - 1], action, s);
        w *= pomdp.observation(s, action, history.observations[depth - 1]);
      }
      if (w > 0.0) recurse(depth + 1, w);
    }
  };
  recurse(0, 1.0);

  double total = 0.0;
  for (double v : joint) total += v;
  for (double& v : joint) v /= total;
  return mmpo::BeliefState{joint};
}

// Joint P(s_T, h) for every history of the given horizon by brute-force path
// enumeration under the uniform behavior policy, in the same lexicographic
// history order as the library enumeration.
struct BruteHistoryJoint {
  std::vector<mmpo::HistoryRecord> histories;
  std::vector<std::vector<double>> joint;  // per history: P(s_T = s, h)
};

inline BruteHistoryJoint brute_history_joint(const mmpo::DiscretePomdp& pomdp,
                                             int horizon) {
  const int A = pomdp.num_actions();
  const int O = pomdp.num_observations();
  const int S = pomdp.num_states();
  BruteHistoryJoint out;

  std::function<void(mmpo::HistoryRecord&, int)> expand =
      [&](mmpo::HistoryRecord& h, int remaining) {
        if (remaining == 0) {
          // Brute state-path sum for this complete history.
          const std::size_t n = h.observations.size();
          std::vector<double> joint(S, 0.0);
          std::vector<int> path(n + 1, 0);
          std::function<void(std::size_t, double)> recurse =
              [&](std::size_t depth, double weight) {
                if (depth == n + 1) {
                  joint[path[n]] += weight;
                  return;
                }
                for (int s = 0; s < S; ++s) {
                  path[depth] = s;
                  double w = weight;
                  if (depth == 0) {
                    w *= pomdp.initial_belief().probs[s];
                  } else {
                    const int action = depth == 1 ? 0 : h.actions[depth - 2];
                    w *= pomdp.transition(path[depth - 1], action, s);
                    w *= pomdp.observation(s, action, h.observations[depth - 1]);
                  }
                  if (w > 0.0) recurse(depth + 1, w);
                }
              };
          recurse(0, 1.0);
          const double action_weight =
              std::pow(1.0 / A, static_cast<double>(h.actions.size()));
          for (double& v : joint) v *= action_weight;
          out.histories.push_back(h);
          out.joint.push_back(std::move(joint));
          return;
        }
        for (int a = 0; a < A; ++a) {
          for (int o = 0; o < O; ++o) {
            h.actions.push_back(a);
            h.observations.push_back(o);
            expand(h, remaining - 1);
            h.actions.pop_back();
            h.observations.pop_back();
          }
        }
      };

  for (int o = 0; o < O; ++o) {
    mmpo::HistoryRecord h;
    h.observations = {o};
    expand(h, horizon);
  }
  return out;
}

// Random POMDP with rows drawn as normalized exponentials.
inline mmpo::DiscretePomdp random_pomdp(int S, int A, int O, mmpo::RngStream& rng) {
  auto random_rows = [&](int rows, int cols) {
    std::vector<double> table(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (int c = 0; c < cols; ++c) {
        const double v = -std::log(1.0 - rng.next_double());
        table[static_cast<std::size_t>(r) * cols + c] = v;
        sum += v;
      }
      for (int c = 0; c < cols; ++c) {
        table[static_cast<std::size_t>(r) * cols + c] /= sum;
      }
    }
    return table;
  };
  std::vector<double> reward(static_cast<std::size_t>(S) * A, 0.0);
  return mmpo::DiscretePomdp(S, A, O, random_rows(S * A, S), random_rows(S * A, O),
                             reward, 1.0, random_rows(1, S));
}

// Samples a consistent history by simulating the generative model.
inline mmpo::HistoryRecord simulate_history(const mmpo::DiscretePomdp& pomdp,
                                            int horizon, mmpo::RngStream& rng) {
  mmpo::HistoryRecord h;
  int state = rng.sample_categorical(pomdp.initial_belief().probs);
  const int S = pomdp.num_states();
  const int O = pomdp.num_observations();
  auto step = [&](int action) {
    std::vector<double> row(S);
    for (int s2 = 0; s2 < S; ++s2) row[s2] = pomdp.transition(state, action, s2);
    state = rng.sample_categorical(row);
    std::vector<double> obs_row(O);
    for (int o = 0; o < O; ++o) obs_row[o] = pomdp.observation(state, action, o);
    h.observations.push_back(rng.sample_categorical(obs_row));
  };
  step(0);
  for (int i = 0; i < horizon; ++i) {
    const int action =
        static_cast<int>(rng.next_below(static_cast<std::uint64_t>(pomdp.num_actions())));
    h.actions.push_back(action);
    step(action);
  }
  return h;
}

// Random policy weights, normal via Box-Muller on the stream.
inline mmpo::PolicyParameters random_params(int vocab, int dim, double scale,
                                            mmpo::RngStream& rng) {
  mmpo::PolicyParameters p = mmpo::PolicyParameters::zeros(vocab, dim);
  for (double& w : p.weights) {
    const double u1 = 1.0 - rng.next_double();
    const double u2 = rng.next_double();
    w = scale * std::sqrt(-2.0 * std::log(u1)) *
        std::cos(2.0 * 3.14159265358979323846 * u2);
  }
  return p;
}

}  // namespace oracle
