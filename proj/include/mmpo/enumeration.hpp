#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mmpo/pomdp.hpp"

namespace mmpo {

// All histories of a fixed horizon (h actions, h+1 observations), with their
// probabilities under a uniform behavior policy and their filter posteriors.
// Histories with zero likelihood are kept with probability 0 and a zero
// posterior so indices stay aligned with the enumeration order.
struct HistoryEnumeration {
  std::vector<HistoryRecord> histories;
  std::vector<double> probability;
  std::vector<BeliefState> posterior;
};

// Guard: A^horizon * Omega^(horizon+1) must not exceed cell_cap.
HistoryEnumeration enumerate_histories(const DiscretePomdp& pomdp, int horizon,
                                       std::size_t cell_cap = 1'000'000);

// Summarizer: maps a history to a probability row over summary ids.
// Deterministic summarizers are represented as degenerate rows.
using SummarizerFn = std::function<std::vector<double>(const HistoryRecord&)>;

SummarizerFn deterministic_summarizer(int num_summaries,
                                      std::function<int(const HistoryRecord&)> f);

struct SummaryBelief {
  int num_states = 0;
  int num_summaries = 0;
  std::vector<BeliefState> belief;  // b^M per summary id; zero row if unreachable
  std::vector<double> p_summary;    // P(m)
  std::vector<double> joint;        // P(s, m), row-major over (s, m)
};

// Mixture over full-history beliefs: b^M(s) = sum_h P(s|h) P(h|m), with
// P(h|m) derived from the exhaustively enumerated joint.
SummaryBelief summary_induced_belief(const DiscretePomdp& pomdp,
                                     const SummarizerFn& summarizer,
                                     int num_summaries, int horizon,
                                     std::size_t cell_cap = 1'000'000);

// H(s|m) = -sum_{s,m} P(s,m) log(P(s,m)/P(m)), in nats, 0 log 0 = 0.
// joint is row-major over (s, m) and must sum to 1 within 1e-9.
double conditional_entropy_state_given_summary(std::span<const double> joint,
                                               int num_states, int num_summaries);

// I(s;m) = H(s) - H(s|m), in nats.
double mutual_information(std::span<const double> joint, int num_states,
                          int num_summaries);

// H of a (sub-)distribution in nats with 0 log 0 = 0; used by oracles and
// the decomposition check.
double entropy_nats(std::span<const double> probs);

}  // namespace mmpo
