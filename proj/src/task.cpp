#include "mmpo/task.hpp"

#include <string>

#include "mmpo/errors.hpp"

namespace mmpo {

SyntheticTask generate_task(const TaskConfig& config, const Vocabulary& vocab,
                            RngStream& rng, std::uint64_t task_id) {
  if (config.num_turns < config.num_facts) {
    throw UnsatisfiableConfig("generate_task: num_turns " +
                              std::to_string(config.num_turns) +
                              " < num_facts " + std::to_string(config.num_facts));
  }
  if (config.chunk_length < 1) {
    throw UnsatisfiableConfig("generate_task: chunk_length must be >= 1");
  }
  SyntheticTask task;
  task.config = config;
  task.task_id = task_id;

  task.hidden_values.resize(config.num_facts);
  for (int f = 0; f < config.num_facts; ++f) {
    task.hidden_values[f] =
        static_cast<int>(rng.next_below(static_cast<std::uint64_t>(config.fact_domain)));
  }

  // Partial Fisher-Yates: the first F entries of a shuffled turn list are the
  // evidence turns, so each fact is revealed exactly once.
  std::vector<int> turns(config.num_turns);
  for (int t = 0; t < config.num_turns; ++t) turns[t] = t;
  for (int f = 0; f < config.num_facts; ++f) {
    const int j = f + static_cast<int>(rng.next_below(
                          static_cast<std::uint64_t>(config.num_turns - f)));
    std::swap(turns[f], turns[j]);
  }
  task.evidence_schedule.assign(config.num_turns, std::nullopt);
  for (int f = 0; f < config.num_facts; ++f) {
    task.evidence_schedule[turns[f]] = std::make_pair(f, task.hidden_values[f]);
  }

  task.chunks.resize(config.num_turns);
  for (int t = 0; t < config.num_turns; ++t) {
    std::vector<int>& chunk = task.chunks[t];
    chunk.assign(config.chunk_length, Vocabulary::kPad);
    int evidence_pos = -1;
    if (task.evidence_schedule[t].has_value()) {
      evidence_pos = static_cast<int>(
          rng.next_below(static_cast<std::uint64_t>(config.chunk_length)));
      const auto [fact, value] = *task.evidence_schedule[t];
      chunk[evidence_pos] = vocab.evidence_id(fact, value);
    }
    if (vocab.num_distractors > 0 && config.distractor_rate > 0.0) {
      for (int i = 0; i < config.chunk_length; ++i) {
        if (i == evidence_pos) continue;
        if (rng.next_double() < config.distractor_rate) {
          chunk[i] = vocab.first_distractor() +
                     static_cast<int>(rng.next_below(
                         static_cast<std::uint64_t>(vocab.num_distractors)));
        }
      }
    }
  }
  return task;
}

}  // namespace mmpo
