#include "mmpo/belief_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mmpo/enumeration.hpp"

namespace mmpo {
namespace {

// Entropy of the full softmax distribution via H = log Z - sum_v p_v * l_v
// with max-subtracted logits l.  Equal to -sum p log p but exact for the
// uniform case: all-zero logits give H = log(V) to the last bit.
double full_distribution_entropy(const TokenDistribution& dist) {
  const std::size_t V = dist.logits.size();
  double max_logit = dist.logits[0];
  for (double l : dist.logits) max_logit = std::max(max_logit, l);
  double z = 0.0;
  for (std::size_t v = 0; v < V; ++v) z += std::exp(dist.logits[v] - max_logit);
  double weighted = 0.0;
  for (std::size_t v = 0; v < V; ++v) {
    if (dist.probs[v] > 0.0) weighted += dist.probs[v] * (dist.logits[v] - max_logit);
  }
  return std::log(z) - weighted;
}

std::vector<int> probability_order(const TokenDistribution& dist) {
  std::vector<int> order(dist.probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dist.probs[a] != dist.probs[b]) return dist.probs[a] > dist.probs[b];
    return a < b;  // ties by lowest token id
  });
  return order;
}

}  // namespace

CandidateSet renormalize_candidates(const TokenDistribution& dist,
                                    const CandidateSetPolicy& policy) {
  const int V = static_cast<int>(dist.probs.size());
  CandidateSet set;
  switch (policy.mode) {
    case CandidateSetPolicy::Mode::kFullVocab: {
      set.ids.resize(V);
      std::iota(set.ids.begin(), set.ids.end(), 0);
      set.probs = dist.probs;
      set.full = true;
      return set;
    }
    case CandidateSetPolicy::Mode::kTopK: {
      if (policy.k < 1 || policy.k > V) {
        throw std::invalid_argument("renormalize_candidates: k out of range");
      }
      const std::vector<int> order = probability_order(dist);
      set.ids.assign(order.begin(), order.begin() + policy.k);
      break;
    }
    case CandidateSetPolicy::Mode::kTopP: {
      if (!(policy.p > 0.0) || policy.p > 1.0) {
        throw std::invalid_argument("renormalize_candidates: p out of range");
      }
      const std::vector<int> order = probability_order(dist);
      if (policy.p >= 1.0) {
        set.ids = order;
        break;
      }
      double mass = 0.0;
      for (int id : order) {
        set.ids.push_back(id);
        mass += dist.probs[id];
        if (mass >= policy.p) break;
      }
      break;
    }
  }
  if (static_cast<int>(set.ids.size()) == V) {
    // Whole vocabulary selected: keep the original probabilities so the
    // result is bit-identical to the FullVocab mode.
    std::sort(set.ids.begin(), set.ids.end());
    set.probs = dist.probs;
    set.full = true;
    return set;
  }
  double mass = 0.0;
  for (int id : set.ids) mass += dist.probs[id];
  if (mass <= 0.0) {
    // Degenerate underflow: put the whole mass on the first candidate.
    set.probs.assign(set.ids.size(), 0.0);
    set.probs[0] = 1.0;
    return set;
  }
  set.probs.resize(set.ids.size());
  for (std::size_t i = 0; i < set.ids.size(); ++i) {
    set.probs[i] = dist.probs[set.ids[i]] / mass;
  }
  return set;
}

double token_entropy(const TokenDistribution& dist,
                     const CandidateSetPolicy& policy) {
  const CandidateSet set = renormalize_candidates(dist, policy);
  if (set.full) return full_distribution_entropy(dist);
  return entropy_nats(set.probs);
}

BeliefEntropyEstimate estimate_belief_entropy(const PolicyParameters& params,
                                              const FeatureSpec& spec,
                                              const MemoryState& memory,
                                              const AnchorQuestion& anchor,
                                              const CandidateSetPolicy& policy,
                                              int max_len, int num_turns) {
  if (max_len < 1) {
    throw std::invalid_argument("estimate_belief_entropy: max_len must be >= 1");
  }
  const double turn_fraction =
      num_turns > 0 ? static_cast<double>(memory.turn) / num_turns : 0.0;
  const std::vector<int> marker{anchor.marker_token};
  ContextFeatures ctx = build_context(spec, memory.tokens, marker, anchor.role,
                                      0, turn_fraction);
  BeliefEntropyEstimate estimate;
  const int cap = std::min(max_len, anchor.response_len);
  for (int j = 0; j < std::max(1, cap); ++j) {
    ctx = with_position(spec, std::move(ctx), j);
    const TokenDistribution dist = token_distribution(params, ctx);
    estimate.per_token.push_back(token_entropy(dist, policy));
    int best = 0;
    for (int v = 1; v < params.vocab_size; ++v) {
      if (dist.logits[v] > dist.logits[best]) best = v;
    }
    if (best == Vocabulary::kEos) break;
  }
  estimate.response_length = static_cast<int>(estimate.per_token.size());
  double sum = 0.0;
  for (double h : estimate.per_token) sum += h;
  estimate.value = sum / estimate.response_length;
  return estimate;
}

DecompositionResult anchor_decomposition_check(std::span<const double> joint_sm,
                                               int num_states, int num_summaries,
                                               std::span<const double> response_model,
                                               int num_responses,
                                               std::size_t cell_cap) {
  const std::size_t cells = static_cast<std::size_t>(num_states) * num_summaries *
                            static_cast<std::size_t>(num_responses);
  if (cells > cell_cap) {
    throw EnumerationTooLarge("anchor_decomposition_check: joint too large");
  }
  if (response_model.size() !=
      static_cast<std::size_t>(num_states) * num_summaries * num_responses) {
    throw std::invalid_argument("anchor_decomposition_check: response model size");
  }
  const auto sm = [&](int s, int m) {
    return joint_sm[static_cast<std::size_t>(s) * num_summaries + m];
  };
  const auto resp = [&](int s, int m, int y) {
    return response_model[(static_cast<std::size_t>(s) * num_summaries + m) *
                              num_responses +
                          y];
  };

  // Full joint P(s, m, y) plus the marginals needed for each term.
  std::vector<double> p_m(num_summaries, 0.0);
  std::vector<double> p_my(static_cast<std::size_t>(num_summaries) * num_responses, 0.0);
  for (int s = 0; s < num_states; ++s) {
    for (int m = 0; m < num_summaries; ++m) {
      p_m[m] += sm(s, m);
      for (int y = 0; y < num_responses; ++y) {
        p_my[static_cast<std::size_t>(m) * num_responses + y] +=
            sm(s, m) * resp(s, m, y);
      }
    }
  }

  DecompositionResult out;
  // H(y|m) from the (m, y) marginal.
  for (int m = 0; m < num_summaries; ++m) {
    for (int y = 0; y < num_responses; ++y) {
      const double p = p_my[static_cast<std::size_t>(m) * num_responses + y];
      if (p > 0.0 && p_m[m] > 0.0) out.h_y_given_m -= p * std::log(p / p_m[m]);
    }
  }
  // H(y|m,s) directly from the full joint.
  for (int s = 0; s < num_states; ++s) {
    for (int m = 0; m < num_summaries; ++m) {
      const double p_sm = sm(s, m);
      if (p_sm <= 0.0) continue;
      for (int y = 0; y < num_responses; ++y) {
        const double r = resp(s, m, y);
        if (r > 0.0) out.h_y_given_ms -= p_sm * r * std::log(r);
      }
    }
  }
  // I(y;s|m) by its own double sum over the full joint.
  for (int s = 0; s < num_states; ++s) {
    for (int m = 0; m < num_summaries; ++m) {
      const double p_sm = sm(s, m);
      if (p_sm <= 0.0 || p_m[m] <= 0.0) continue;
      for (int y = 0; y < num_responses; ++y) {
        const double p_smy = p_sm * resp(s, m, y);
        if (p_smy <= 0.0) continue;
        const double p_y_given_m =
            p_my[static_cast<std::size_t>(m) * num_responses + y] / p_m[m];
        const double p_y_given_sm = resp(s, m, y);
        out.mi_y_s_given_m += p_smy * std::log(p_y_given_sm / p_y_given_m);
      }
    }
  }
  out.h_s_given_m =
      conditional_entropy_state_given_summary(joint_sm, num_states, num_summaries);
  out.identity_residual =
      std::abs(out.h_y_given_m - out.h_y_given_ms - out.mi_y_s_given_m);
  return out;
}

}  // namespace mmpo
