#include "mmpo/agent.hpp"

#include <cmath>
#include <stdexcept>

namespace mmpo {

MemoryState update_memory(const PolicyParameters& params, const FeatureSpec& spec,
                          const MemoryState& memory, std::span<const int> obs,
                          int num_turns, int memory_budget, RngStream& rng,
                          std::vector<TokenRecord>* generation_log) {
  if (memory_budget < 1) {
    throw std::invalid_argument("update_memory: memory budget must be >= 1");
  }
  const int turn = memory.turn + 1;
  const double turn_fraction =
      num_turns > 0 ? static_cast<double>(turn) / num_turns : 0.0;
  ContextFeatures base = build_context(spec, memory.tokens, obs,
                                       Role::kMemoryWrite, 0, turn_fraction);
  MemoryState next;
  next.turn = turn;
  ContextFeatures ctx = base;
  for (int j = 0; j < memory_budget; ++j) {
    ctx = with_position(spec, std::move(ctx), j);
    const TokenDistribution dist = token_distribution(params, ctx);
    const int token = rng.sample_categorical(dist.probs);
    const double log_prob = std::log(dist.probs[token]);
    if (generation_log != nullptr) {
      generation_log->push_back(TokenRecord{token, log_prob, ctx});
    }
    if (token == Vocabulary::kEos) break;
    next.tokens.push_back(token);
  }
  return next;
}

std::pair<AnswerRecord, double> answer_and_score(const PolicyParameters& params,
                                                 const FeatureSpec& spec,
                                                 const Vocabulary& vocab,
                                                 const MemoryState& memory,
                                                 const SyntheticTask& task) {
  AnswerRecord record;
  const int F = task.config.num_facts;
  const int K = task.config.fact_domain;
  int correct = 0;
  for (int f = 0; f < F; ++f) {
    const std::vector<int> prompt{Vocabulary::kAnswerPrompt};
    ContextFeatures ctx =
        build_context(spec, memory.tokens, prompt, Role::kAnswer, f, 1.0);
    const TokenDistribution dist = token_distribution(params, ctx);
    // Slot-restricted greedy: the answer for fact f is one of its K value
    // tokens, ties broken by lowest id.
    int best = vocab.evidence_id(f, 0);
    for (int v = 1; v < K; ++v) {
      const int id = vocab.evidence_id(f, v);
      if (dist.logits[id] > dist.logits[best]) best = id;
    }
    record.tokens.push_back(best);
    record.generation.push_back(TokenRecord{best, std::log(dist.probs[best]), ctx});
    if (vocab.evidence_value(best) == task.hidden_values[f]) ++correct;
  }
  return {std::move(record), static_cast<double>(correct) / F};
}

Trajectory rollout(const PolicyParameters& params, const FeatureSpec& spec,
                   const Vocabulary& vocab, const SyntheticTask& task,
                   const AnchorQuestion& anchor, const CandidateSetPolicy& be_policy,
                   RngStream rng) {
  Trajectory traj;
  traj.task_id = task.task_id;
  traj.rng_key = rng.key();
  traj.policy_version = params.version;

  const int T = task.config.num_turns;
  MemoryState memory;
  for (int t = 0; t < T; ++t) {
    TurnRecord turn;
    turn.observation = task.chunks[t];
    memory = update_memory(params, spec, memory, turn.observation, T,
                           task.config.memory_budget, rng, &turn.memory_generation);
    turn.memory = memory;

    // Probe the updated memory: greedy anchor response plus its entropy.
    const double turn_fraction = static_cast<double>(memory.turn) / T;
    const std::vector<int> marker{anchor.marker_token};
    const ContextFeatures anchor_ctx = build_context(
        spec, memory.tokens, marker, anchor.role, 0, turn_fraction);
    turn.anchor_response =
        greedy_decode(params, spec, anchor_ctx, anchor.response_len);
    turn.belief_entropy = estimate_belief_entropy(
        params, spec, memory, anchor, be_policy, anchor.response_len, T);
    traj.turns.push_back(std::move(turn));
  }

  auto [answer, outcome] = answer_and_score(params, spec, vocab, memory, task);
  traj.answer = std::move(answer);
  traj.outcome_reward = outcome;
  return traj;
}

}  // namespace mmpo
