#include "mmpo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace mmpo {

Vocabulary Vocabulary::for_task(int num_facts, int fact_domain, int extra_distractors) {
  if (num_facts <= 0 || fact_domain <= 0 || extra_distractors < 0) {
    throw std::invalid_argument("Vocabulary: invalid task dimensions");
  }
  Vocabulary v;
  v.num_facts = num_facts;
  v.fact_domain = fact_domain;
  int size = kEvidenceBase + num_facts * fact_domain + extra_distractors;
  int distractors = extra_distractors;
  while (size < 8) {
    ++distractors;
    ++size;
  }
  v.num_distractors = distractors;
  v.size = size;
  return v;
}

ContextFeatures build_context(const FeatureSpec& spec,
                              std::span<const int> memory_tokens,
                              std::span<const int> obs_tokens, Role role,
                              int position, double turn_fraction) {
  if (position < 0 || position >= spec.max_positions) {
    throw std::invalid_argument("build_context: position out of range");
  }
  ContextFeatures ctx;
  ctx.values.assign(spec.dim(), 0.0);
  for (int t : memory_tokens) {
    if (t < 0 || t >= spec.vocab_size) {
      throw std::invalid_argument("build_context: memory token out of vocabulary");
    }
    ctx.values[spec.memory_offset() + t] += 1.0;
  }
  for (int t : obs_tokens) {
    if (t < 0 || t >= spec.vocab_size) {
      throw std::invalid_argument("build_context: observation token out of vocabulary");
    }
    ctx.values[spec.obs_offset() + t] += 1.0;
  }
  ctx.values[spec.role_offset() + static_cast<int>(role)] = 1.0;
  ctx.values[spec.position_offset() + position] = 1.0;
  ctx.values[spec.turn_index()] = turn_fraction;
  return ctx;
}

ContextFeatures with_position(const FeatureSpec& spec, ContextFeatures ctx,
                              int position) {
  if (position < 0 || position >= spec.max_positions) {
    throw std::invalid_argument("with_position: position out of range");
  }
  for (int p = 0; p < spec.max_positions; ++p) {
    ctx.values[spec.position_offset() + p] = 0.0;
  }
  ctx.values[spec.position_offset() + position] = 1.0;
  return ctx;
}

PolicyParameters PolicyParameters::zeros(int vocab_size, int feature_dim) {
  PolicyParameters p;
  p.vocab_size = vocab_size;
  p.feature_dim = feature_dim;
  p.weights.assign(static_cast<std::size_t>(vocab_size) * feature_dim, 0.0);
  return p;
}

TokenDistribution softmax_distribution(std::vector<double> logits) {
  TokenDistribution dist;
  double max_logit = logits[0];
  for (double l : logits) max_logit = std::max(max_logit, l);
  std::vector<double> probs(logits.size());
  double z = 0.0;
  for (std::size_t v = 0; v < logits.size(); ++v) {
    probs[v] = std::exp(logits[v] - max_logit);
    z += probs[v];
  }
  for (std::size_t v = 0; v < logits.size(); ++v) probs[v] /= z;
  dist.logits = std::move(logits);
  dist.probs = std::move(probs);
  return dist;
}

TokenDistribution token_distribution(const PolicyParameters& params,
                                     const ContextFeatures& ctx) {
  if (static_cast<int>(ctx.values.size()) != params.feature_dim) {
    throw DimensionMismatch("token_distribution: context dimension " +
                            std::to_string(ctx.values.size()) + " vs feature_dim " +
                            std::to_string(params.feature_dim));
  }
  std::vector<double> logits(params.vocab_size, 0.0);
  for (int v = 0; v < params.vocab_size; ++v) {
    double acc = 0.0;
    const double* row = params.weights.data() +
                        static_cast<std::size_t>(v) * params.feature_dim;
    for (int d = 0; d < params.feature_dim; ++d) acc += row[d] * ctx.values[d];
    logits[v] = acc;
  }
  return softmax_distribution(std::move(logits));
}

GeneratedSequence sample_sequence(const PolicyParameters& params,
                                  const FeatureSpec& spec,
                                  const ContextFeatures& initial_ctx, int max_len,
                                  RngStream& rng) {
  if (max_len < 1) throw std::invalid_argument("sample_sequence: max_len must be >= 1");
  GeneratedSequence seq;
  ContextFeatures ctx = initial_ctx;
  for (int j = 0; j < max_len; ++j) {
    ctx = with_position(spec, std::move(ctx), j);
    const TokenDistribution dist = token_distribution(params, ctx);
    const int token = rng.sample_categorical(dist.probs);
    seq.tokens.push_back(token);
    seq.log_probs.push_back(std::log(dist.probs[token]));
    if (token == Vocabulary::kEos) break;
  }
  return seq;
}

std::vector<int> greedy_decode(const PolicyParameters& params,
                               const FeatureSpec& spec,
                               const ContextFeatures& initial_ctx, int max_len) {
  if (max_len < 1) throw std::invalid_argument("greedy_decode: max_len must be >= 1");
  std::vector<int> tokens;
  ContextFeatures ctx = initial_ctx;
  for (int j = 0; j < max_len; ++j) {
    ctx = with_position(spec, std::move(ctx), j);
    const TokenDistribution dist = token_distribution(params, ctx);
    int best = 0;
    for (int v = 1; v < params.vocab_size; ++v) {
      if (dist.logits[v] > dist.logits[best]) best = v;
    }
    tokens.push_back(best);
    if (best == Vocabulary::kEos) break;
  }
  return tokens;
}

std::vector<double> sequence_log_prob(const PolicyParameters& params,
                                      const FeatureSpec& spec,
                                      const ContextFeatures& initial_ctx,
                                      std::span<const int> tokens) {
  std::vector<double> log_probs;
  log_probs.reserve(tokens.size());
  ContextFeatures ctx = initial_ctx;
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    if (tokens[j] < 0 || tokens[j] >= params.vocab_size) {
      throw std::invalid_argument("sequence_log_prob: token out of vocabulary");
    }
    ctx = with_position(spec, std::move(ctx), static_cast<int>(j));
    const TokenDistribution dist = token_distribution(params, ctx);
    log_probs.push_back(std::log(dist.probs[tokens[j]]));
  }
  return log_probs;
}

double kl_divergence(const PolicyParameters& params_p,
                     const PolicyParameters& params_q,
                     const ContextFeatures& ctx) {
  if (params_p.vocab_size != params_q.vocab_size ||
      params_p.feature_dim != params_q.feature_dim) {
    throw DimensionMismatch("kl_divergence: parameter shapes differ");
  }
  const TokenDistribution p = token_distribution(params_p, ctx);
  const TokenDistribution q = token_distribution(params_q, ctx);
  double kl = 0.0;
  for (int v = 0; v < params_p.vocab_size; ++v) {
    if (p.probs[v] > 0.0) {
      kl += p.probs[v] * (std::log(p.probs[v]) - std::log(q.probs[v]));
    }
  }
  return kl;
}

void accumulate_log_prob_gradient(const PolicyParameters& params,
                                  const ContextFeatures& ctx, int token,
                                  double scale, std::span<double> grad) {
  if (grad.size() != params.weights.size()) {
    throw DimensionMismatch("accumulate_log_prob_gradient: gradient buffer size");
  }
  const TokenDistribution dist = token_distribution(params, ctx);
  // d log pi(w) / d logits = e_w - p; chain through logits = W phi.
  for (int v = 0; v < params.vocab_size; ++v) {
    const double coeff = scale * ((v == token ? 1.0 : 0.0) - dist.probs[v]);
    if (coeff == 0.0) continue;
    double* row = grad.data() + static_cast<std::size_t>(v) * params.feature_dim;
    for (int d = 0; d < params.feature_dim; ++d) {
      row[d] += coeff * ctx.values[d];
    }
  }
}

void accumulate_kl_gradient(const PolicyParameters& params,
                            const PolicyParameters& ref,
                            const ContextFeatures& ctx, double scale,
                            std::span<double> grad) {
  if (grad.size() != params.weights.size()) {
    throw DimensionMismatch("accumulate_kl_gradient: gradient buffer size");
  }
  const TokenDistribution p = token_distribution(params, ctx);
  const TokenDistribution q = token_distribution(ref, ctx);
  double kl = 0.0;
  for (int v = 0; v < params.vocab_size; ++v) {
    if (p.probs[v] > 0.0) {
      kl += p.probs[v] * (std::log(p.probs[v]) - std::log(q.probs[v]));
    }
  }
  // d KL / d logit_u = p_u * (log(p_u/q_u) - KL).
  for (int v = 0; v < params.vocab_size; ++v) {
    if (p.probs[v] <= 0.0) continue;
    const double coeff =
        scale * p.probs[v] *
        ((std::log(p.probs[v]) - std::log(q.probs[v])) - kl);
    double* row = grad.data() + static_cast<std::size_t>(v) * params.feature_dim;
    for (int d = 0; d < params.feature_dim; ++d) {
      row[d] += coeff * ctx.values[d];
    }
  }
}

void save_checkpoint(const PolicyParameters& params, std::uint64_t config_hash,
                     const std::string& path) {
  nlohmann::json doc;
  doc["format"] = 1;
  doc["config_hash"] = config_hash;
  doc["policy_version"] = params.version;
  doc["vocab_size"] = params.vocab_size;
  doc["feature_dim"] = params.feature_dim;
  doc["weights"] = params.weights;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << doc.dump() << "\n";
}

PolicyParameters load_checkpoint(const std::string& path,
                                 std::uint64_t expected_config_hash) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointMismatch("checkpoint " + path + ": " + e.what());
  }
  if (doc.value("format", 0) != 1) {
    throw CheckpointMismatch("checkpoint " + path + ": unknown format");
  }
  const auto hash = doc.at("config_hash").get<std::uint64_t>();
  if (hash != expected_config_hash) {
    throw CheckpointMismatch("checkpoint " + path + ": config hash mismatch");
  }
  PolicyParameters params;
  params.vocab_size = doc.at("vocab_size").get<int>();
  params.feature_dim = doc.at("feature_dim").get<int>();
  params.version = doc.at("policy_version").get<std::uint64_t>();
  params.weights = doc.at("weights").get<std::vector<double>>();
  if (params.weights.size() !=
      static_cast<std::size_t>(params.vocab_size) * params.feature_dim) {
    throw CheckpointMismatch("checkpoint " + path + ": weight count mismatch");
  }
  return params;
}

}  // namespace mmpo
