#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mmpo/anchor.hpp"
#include "mmpo/belief_entropy.hpp"
#include "mmpo/policy.hpp"
#include "mmpo/task.hpp"

namespace mmpo {

// One generated token with everything needed to re-score it later.
struct TokenRecord {
  int token = 0;
  double log_prob = 0.0;
  ContextFeatures context;
};

struct TurnRecord {
  std::vector<int> observation;
  MemoryState memory;  // m_t, after the update
  std::vector<TokenRecord> memory_generation;  // sampled tokens incl. EOS
  std::vector<int> anchor_response;
  BeliefEntropyEstimate belief_entropy;
};

struct AnswerRecord {
  std::vector<int> tokens;                 // one value token per fact slot
  std::vector<TokenRecord> generation;     // contexts for optional training
};

struct Trajectory {
  std::uint64_t task_id = 0;
  std::uint64_t rng_key = 0;
  std::uint64_t policy_version = 0;
  std::vector<TurnRecord> turns;
  AnswerRecord answer;
  double outcome_reward = 0.0;
};

// m_t = pi_mem(m_{t-1}, o_t): samples up to the memory budget in the
// memory-write role; a sampled end-of-sequence token stops the write early
// and is kept in the generation record but not in the memory.
MemoryState update_memory(const PolicyParameters& params, const FeatureSpec& spec,
                          const MemoryState& memory, std::span<const int> obs,
                          int num_turns, int memory_budget, RngStream& rng,
                          std::vector<TokenRecord>* generation_log = nullptr);

// Greedy-decodes one value token per fact slot (restricted to that fact's
// evidence ids) and scores the fraction of correct slots.
std::pair<AnswerRecord, double> answer_and_score(const PolicyParameters& params,
                                                 const FeatureSpec& spec,
                                                 const Vocabulary& vocab,
                                                 const MemoryState& memory,
                                                 const SyntheticTask& task);

// One full episode: T memory updates, a belief-entropy probe after each, and
// the final answer.  Bit-reproducible given the same stream.
Trajectory rollout(const PolicyParameters& params, const FeatureSpec& spec,
                   const Vocabulary& vocab, const SyntheticTask& task,
                   const AnchorQuestion& anchor, const CandidateSetPolicy& be_policy,
                   RngStream rng);

}  // namespace mmpo
