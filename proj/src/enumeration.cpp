#include "mmpo/enumeration.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mmpo {
namespace {

constexpr double kLikelihoodFloor = 1e-300;
constexpr double kJointSumTol = 1e-9;

void check_joint(std::span<const double> joint, int num_states, int num_summaries) {
  if (static_cast<std::size_t>(num_states) * num_summaries != joint.size()) {
    throw std::invalid_argument("joint table size mismatch");
  }
  double sum = 0.0;
  for (double v : joint) {
    if (!(v >= 0.0)) throw std::invalid_argument("joint table has negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kJointSumTol) {
    throw std::invalid_argument("joint table sums to " + std::to_string(sum) +
                                ", expected 1");
  }
}

// Non-throwing filter step used during exhaustive enumeration; returns the
// predicted observation probability (0 when the branch is impossible).
double filter_step(const DiscretePomdp& pomdp, const std::vector<double>& prior,
                   int action, int obs, std::vector<double>* out) {
  const int S = pomdp.num_states();
  double total = 0.0;
  for (int s2 = 0; s2 < S; ++s2) {
    double predicted = 0.0;
    for (int s = 0; s < S; ++s) {
      predicted += pomdp.transition(s, action, s2) * prior[s];
    }
    (*out)[s2] = pomdp.observation(s2, action, obs) * predicted;
    total += (*out)[s2];
  }
  if (total < kLikelihoodFloor) return 0.0;
  for (int s2 = 0; s2 < S; ++s2) (*out)[s2] /= total;
  return total;
}

}  // namespace

double entropy_nats(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

HistoryEnumeration enumerate_histories(const DiscretePomdp& pomdp, int horizon,
                                       std::size_t cell_cap) {
  if (horizon < 0) throw std::invalid_argument("enumerate_histories: negative horizon");
  const int A = pomdp.num_actions();
  const int O = pomdp.num_observations();
  double cells = static_cast<double>(O);
  for (int i = 0; i < horizon; ++i) cells *= static_cast<double>(A) * O;
  if (cells > static_cast<double>(cell_cap)) {
    throw EnumerationTooLarge("enumerate_histories: " + std::to_string(cells) +
                              " histories exceed cap " + std::to_string(cell_cap));
  }

  HistoryEnumeration result;
  const int S = pomdp.num_states();
  const double action_prob = 1.0 / static_cast<double>(A);

  struct Node {
    HistoryRecord history;
    std::vector<double> belief;
    double probability;  // P(h) under the uniform behavior policy
    bool alive;
  };

  // Depth-first expansion in lexicographic (observation, action) order keeps
  // the enumeration order stable.
  std::vector<Node> frontier;
  {
    // First observation under the designated initial action 0.
    for (int o = 0; o < O; ++o) {
      Node node;
      node.history.observations = {o};
      node.belief.assign(S, 0.0);
      std::vector<double> prior = pomdp.initial_belief().probs;
      const double p_obs = filter_step(pomdp, prior, 0, o, &node.belief);
      node.probability = p_obs;
      node.alive = p_obs > 0.0;
      frontier.push_back(std::move(node));
    }
  }
  for (int step = 0; step < horizon; ++step) {
    std::vector<Node> next;
    next.reserve(frontier.size() * A * O);
    for (const Node& node : frontier) {
      for (int a = 0; a < A; ++a) {
        for (int o = 0; o < O; ++o) {
          Node child;
          child.history = node.history;
          child.history.actions.push_back(a);
          child.history.observations.push_back(o);
          child.belief.assign(S, 0.0);
          if (node.alive) {
            const double p_obs = filter_step(pomdp, node.belief, a, o, &child.belief);
            child.probability = node.probability * action_prob * p_obs;
            child.alive = p_obs > 0.0;
          } else {
            child.probability = 0.0;
            child.alive = false;
          }
          if (!child.alive) child.belief.assign(S, 0.0);
          next.push_back(std::move(child));
        }
      }
    }
    frontier = std::move(next);
  }

  result.histories.reserve(frontier.size());
  result.probability.reserve(frontier.size());
  result.posterior.reserve(frontier.size());
  for (Node& node : frontier) {
    result.histories.push_back(std::move(node.history));
    result.probability.push_back(node.alive ? node.probability : 0.0);
    result.posterior.push_back(BeliefState{std::move(node.belief)});
  }
  return result;
}

SummarizerFn deterministic_summarizer(int num_summaries,
                                      std::function<int(const HistoryRecord&)> f) {
  return [num_summaries, f = std::move(f)](const HistoryRecord& h) {
    std::vector<double> row(num_summaries, 0.0);
    const int m = f(h);
    if (m < 0 || m >= num_summaries) {
      throw std::invalid_argument("deterministic_summarizer: id out of range");
    }
    row[m] = 1.0;
    return row;
  };
}

SummaryBelief summary_induced_belief(const DiscretePomdp& pomdp,
                                     const SummarizerFn& summarizer,
                                     int num_summaries, int horizon,
                                     std::size_t cell_cap) {
  if (num_summaries <= 0) {
    throw std::invalid_argument("summary_induced_belief: need at least one summary id");
  }
  const HistoryEnumeration histories = enumerate_histories(pomdp, horizon, cell_cap);
  const int S = pomdp.num_states();
  const int M = num_summaries;

  SummaryBelief out;
  out.num_states = S;
  out.num_summaries = M;
  out.p_summary.assign(M, 0.0);
  out.joint.assign(static_cast<std::size_t>(S) * M, 0.0);

  for (std::size_t h = 0; h < histories.histories.size(); ++h) {
    const double p_h = histories.probability[h];
    if (p_h <= 0.0) continue;
    std::vector<double> row = summarizer(histories.histories[h]);
    if (static_cast<int>(row.size()) != M) {
      throw std::invalid_argument("summary_induced_belief: summarizer row length mismatch");
    }
    double row_sum = 0.0;
    for (double v : row) {
      if (!(v >= 0.0)) {
        throw std::invalid_argument("summary_induced_belief: negative summarizer entry");
      }
      row_sum += v;
    }
    if (std::abs(row_sum - 1.0) > kJointSumTol) {
      throw std::invalid_argument("summary_induced_belief: summarizer row must sum to 1");
    }
    for (int m = 0; m < M; ++m) {
      if (row[m] <= 0.0) continue;
      const double p_hm = p_h * row[m];
      out.p_summary[m] += p_hm;
      for (int s = 0; s < S; ++s) {
        out.joint[static_cast<std::size_t>(s) * M + m] +=
            histories.posterior[h].probs[s] * p_hm;
      }
    }
  }

  out.belief.resize(M);
  for (int m = 0; m < M; ++m) {
    out.belief[m].probs.assign(S, 0.0);
    if (out.p_summary[m] <= 0.0) continue;
    for (int s = 0; s < S; ++s) {
      out.belief[m].probs[s] =
          out.joint[static_cast<std::size_t>(s) * M + m] / out.p_summary[m];
    }
  }
  return out;
}

double conditional_entropy_state_given_summary(std::span<const double> joint,
                                               int num_states, int num_summaries) {
  check_joint(joint, num_states, num_summaries);
  std::vector<double> p_m(num_summaries, 0.0);
  for (int s = 0; s < num_states; ++s) {
    for (int m = 0; m < num_summaries; ++m) {
      p_m[m] += joint[static_cast<std::size_t>(s) * num_summaries + m];
    }
  }
  double h = 0.0;
  for (int s = 0; s < num_states; ++s) {
    for (int m = 0; m < num_summaries; ++m) {
      const double p = joint[static_cast<std::size_t>(s) * num_summaries + m];
      if (p > 0.0) h -= p * std::log(p / p_m[m]);
    }
  }
  return h;
}

double mutual_information(std::span<const double> joint, int num_states,
                          int num_summaries) {
  check_joint(joint, num_states, num_summaries);
  std::vector<double> p_s(num_states, 0.0);
  for (int s = 0; s < num_states; ++s) {
    for (int m = 0; m < num_summaries; ++m) {
      p_s[s] += joint[static_cast<std::size_t>(s) * num_summaries + m];
    }
  }
  return entropy_nats(p_s) -
         conditional_entropy_state_given_summary(joint, num_states, num_summaries);
}

}  // namespace mmpo
