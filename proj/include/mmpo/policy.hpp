#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mmpo/errors.hpp"
#include "mmpo/rng.hpp"

namespace mmpo {

// Generation roles share one weight matrix and are told apart by a one-hot
// block in the context features.
enum class Role { kMemoryWrite = 0, kAnchorResponse = 1, kAnswer = 2 };
inline constexpr int kNumRoles = 3;

// Token universe for a task family.  Fixed reserved ids, then one id per
// evidence value (fact, value) pair, then distractor ids.  The vocabulary is
// padded with distractors until it holds at least 8 tokens.
struct Vocabulary {
  static constexpr int kPad = 0;
  static constexpr int kEos = 1;
  static constexpr int kAnchorProgressGap = 2;
  static constexpr int kAnchorGapOnly = 3;
  static constexpr int kAnswerPrompt = 4;
  static constexpr int kEvidenceBase = 5;

  int size = 0;
  int num_facts = 0;
  int fact_domain = 0;
  int num_distractors = 0;

  static Vocabulary for_task(int num_facts, int fact_domain, int extra_distractors);

  int evidence_id(int fact, int value) const {
    return kEvidenceBase + fact * fact_domain + value;
  }
  bool is_evidence(int id) const {
    return id >= kEvidenceBase && id < kEvidenceBase + num_facts * fact_domain;
  }
  int evidence_fact(int id) const { return (id - kEvidenceBase) / fact_domain; }
  int evidence_value(int id) const { return (id - kEvidenceBase) % fact_domain; }
  int first_distractor() const { return kEvidenceBase + num_facts * fact_domain; }
};

// Layout of the context feature vector:
//   [0, V)              bag of memory tokens (counts)
//   [V, 2V)             bag of observation tokens (counts)
//   [2V, 2V+3)          role one-hot
//   [2V+3, 2V+3+P)      output-position one-hot
//   [2V+3+P]            turn index scaled to [0, 1]
struct FeatureSpec {
  int vocab_size = 0;
  int max_positions = 0;

  int dim() const { return 2 * vocab_size + kNumRoles + max_positions + 1; }
  int memory_offset() const { return 0; }
  int obs_offset() const { return vocab_size; }
  int role_offset() const { return 2 * vocab_size; }
  int position_offset() const { return 2 * vocab_size + kNumRoles; }
  int turn_index() const { return 2 * vocab_size + kNumRoles + max_positions; }
};

struct ContextFeatures {
  std::vector<double> values;
};

ContextFeatures build_context(const FeatureSpec& spec,
                              std::span<const int> memory_tokens,
                              std::span<const int> obs_tokens, Role role,
                              int position, double turn_fraction);

// Same context with the output-position one-hot moved to `position`.
ContextFeatures with_position(const FeatureSpec& spec, ContextFeatures ctx,
                              int position);

// Softmax-linear token policy weights, one row per vocabulary token.
struct PolicyParameters {
  int vocab_size = 0;
  int feature_dim = 0;
  std::vector<double> weights;  // row-major V x D
  std::uint64_t version = 0;

  static PolicyParameters zeros(int vocab_size, int feature_dim);

  double w(int v, int d) const {
    return weights[static_cast<std::size_t>(v) * feature_dim + d];
  }
  double& w(int v, int d) {
    return weights[static_cast<std::size_t>(v) * feature_dim + d];
  }
};

struct TokenDistribution {
  std::vector<double> logits;
  std::vector<double> probs;
};

// Max-subtracted softmax; summation runs in token-id order so results are
// reproducible against a re-implementation with the same loop structure.
TokenDistribution softmax_distribution(std::vector<double> logits);

TokenDistribution token_distribution(const PolicyParameters& params,
                                     const ContextFeatures& ctx);

struct GeneratedSequence {
  std::vector<int> tokens;
  std::vector<double> log_probs;
};

// Autoregressive sampling; the bag features stay fixed and only the position
// one-hot advances.  Stops after the end-of-sequence token or max_len.
GeneratedSequence sample_sequence(const PolicyParameters& params,
                                  const FeatureSpec& spec,
                                  const ContextFeatures& initial_ctx, int max_len,
                                  RngStream& rng);

// Argmax decode, ties broken by lowest token id.
std::vector<int> greedy_decode(const PolicyParameters& params,
                               const FeatureSpec& spec,
                               const ContextFeatures& initial_ctx, int max_len);

// Per-token log-probabilities of a fixed sequence under the same prefix
// contexts as generation; exactly equal to sample-time values.
std::vector<double> sequence_log_prob(const PolicyParameters& params,
                                      const FeatureSpec& spec,
                                      const ContextFeatures& initial_ctx,
                                      std::span<const int> tokens);

// Exact categorical KL(p || q) at one context, in nats.
double kl_divergence(const PolicyParameters& params_p,
                     const PolicyParameters& params_q,
                     const ContextFeatures& ctx);

// grad += scale * d log pi(token | ctx) / dW, written into a row-major V x D
// buffer.
void accumulate_log_prob_gradient(const PolicyParameters& params,
                                  const ContextFeatures& ctx, int token,
                                  double scale, std::span<double> grad);

// grad += scale * d KL(pi_params || pi_ref) / dW at one context.
void accumulate_kl_gradient(const PolicyParameters& params,
                            const PolicyParameters& ref,
                            const ContextFeatures& ctx, double scale,
                            std::span<double> grad);

// Versioned checkpoint: weights plus the owning experiment's config hash.
void save_checkpoint(const PolicyParameters& params, std::uint64_t config_hash,
                     const std::string& path);
PolicyParameters load_checkpoint(const std::string& path,
                                 std::uint64_t expected_config_hash);

}  // namespace mmpo
