#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mmpo/policy.hpp"
#include "mmpo/rng.hpp"

namespace mmpo {

struct TaskConfig {
  int num_facts = 1;       // F
  int fact_domain = 2;     // K values per fact
  int num_turns = 2;       // T
  int chunk_length = 16;   // tokens per observation chunk
  int memory_budget = 8;   // M
  int extra_distractors = 1;
  double distractor_rate = 0.2;
  int anchor_max_len = 4;

  Vocabulary vocabulary() const {
    return Vocabulary::for_task(num_facts, fact_domain, extra_distractors);
  }
  FeatureSpec feature_spec() const {
    FeatureSpec spec;
    spec.vocab_size = vocabulary().size;
    spec.max_positions = std::max(memory_budget, std::max(anchor_max_len, num_facts));
    return spec;
  }
};

// Multi-hop evidence task: F latent fact values, revealed once each through
// evidence tokens scattered over T observation chunks.
struct SyntheticTask {
  TaskConfig config;
  std::uint64_t task_id = 0;
  std::vector<int> hidden_values;  // F values in [0, K)
  // Per turn: the (fact, value) revealed at that turn, if any.
  std::vector<std::optional<std::pair<int, int>>> evidence_schedule;
  std::vector<std::vector<int>> chunks;  // T x chunk_length token ids
};

// Samples a solvable task: hidden values uniform, each fact scheduled exactly
// once at a distinct random turn.  Throws UnsatisfiableConfig when T < F.
SyntheticTask generate_task(const TaskConfig& config, const Vocabulary& vocab,
                            RngStream& rng, std::uint64_t task_id = 0);

}  // namespace mmpo
