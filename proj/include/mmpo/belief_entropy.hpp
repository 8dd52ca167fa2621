#pragma once

#include <span>
#include <vector>

#include "mmpo/anchor.hpp"
#include "mmpo/policy.hpp"

namespace mmpo {

// Token set used for per-step entropy: the full vocabulary, or a top-K /
// top-p subset with renormalized probabilities.
struct CandidateSetPolicy {
  enum class Mode { kFullVocab, kTopK, kTopP };
  Mode mode = Mode::kFullVocab;
  int k = 1;
  double p = 1.0;

  static CandidateSetPolicy full_vocab() { return {}; }
  static CandidateSetPolicy top_k(int k) {
    return {Mode::kTopK, k, 1.0};
  }
  static CandidateSetPolicy top_p(double p) {
    return {Mode::kTopP, 1, p};
  }
};

struct CandidateSet {
  std::vector<int> ids;
  std::vector<double> probs;
  bool full = false;  // set covers the whole vocabulary; probs are unchanged
};

// FullVocab: identity.  TopK: k highest-probability tokens, ties by lowest
// id, renormalized.  TopP: smallest prefix of the probability-sorted tokens
// with cumulative mass >= p, renormalized.  When the selected set covers the
// whole vocabulary the probabilities are returned unchanged, so TopK(V) and
// TopP(1.0) coincide with FullVocab exactly.
CandidateSet renormalize_candidates(const TokenDistribution& dist,
                                    const CandidateSetPolicy& policy);

// Per-step predictive entropy over the renormalized candidate set, in nats.
double token_entropy(const TokenDistribution& dist,
                     const CandidateSetPolicy& policy);

struct BeliefEntropyEstimate {
  double value = 0.0;               // mean of per_token
  std::vector<double> per_token;
  int response_length = 0;
};

// Mean token-level predictive entropy of the greedy response to the anchor
// question given the current memory.  Every decoded step contributes,
// including the end-of-sequence step.
BeliefEntropyEstimate estimate_belief_entropy(const PolicyParameters& params,
                                              const FeatureSpec& spec,
                                              const MemoryState& memory,
                                              const AnchorQuestion& anchor,
                                              const CandidateSetPolicy& policy,
                                              int max_len, int num_turns);

// Chain-rule decomposition on an enumerable joint:
//   H(y|m) = H(y|m,s) + I(y;s|m)   and   I(y;s|m) <= H(s|m)
// with the anchor question fixed.  All terms are computed by independent
// summations over the joint built from P(s,m) and the response model
// P(y|s,m) (row-major over (s, m) -> y).
struct DecompositionResult {
  double h_y_given_m = 0.0;
  double h_y_given_ms = 0.0;
  double mi_y_s_given_m = 0.0;
  double h_s_given_m = 0.0;
  double identity_residual = 0.0;  // |H(y|m) - H(y|m,s) - I(y;s|m)|
};

DecompositionResult anchor_decomposition_check(std::span<const double> joint_sm,
                                               int num_states, int num_summaries,
                                               std::span<const double> response_model,
                                               int num_responses,
                                               std::size_t cell_cap = 1'000'000);

}  // namespace mmpo
