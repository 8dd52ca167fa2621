#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "mmpo/anchor.hpp"
#include "mmpo/belief_entropy.hpp"
#include "mmpo/task.hpp"

namespace mmpo {

struct TrainerConfig {
  double alpha = 0.5;          // belief-entropy reward weight
  double beta = 1e-3;          // KL coefficient
  double clip_epsilon = 0.2;
  double learning_rate = 1e-2; // constant schedule
  double std_floor = 1e-6;
  int group_size = 16;         // G
  int prompts_per_batch = 8;
  int epochs_per_batch = 1;
  bool advantage_on_answer_tokens = false;
  bool use_adam = false;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

struct EvalConfig {
  int num_episodes = 1000;
  int best_of_n = 0;  // 0 disables the best-of-N comparison
};

// Every tunable of a run.  (config, seed) fully determines all outputs.
struct ExperimentConfig {
  TaskConfig task;
  TrainerConfig trainer;
  AnchorVariant anchor = AnchorVariant::kProgressGap;
  CandidateSetPolicy candidate_set;
  std::uint64_t seed = 0;
  int num_iterations = 200;
  int checkpoint_interval = 50;
  EvalConfig eval;

  Vocabulary vocabulary() const { return task.vocabulary(); }
  FeatureSpec feature_spec() const { return task.feature_spec(); }
  AnchorQuestion anchor_question() const {
    return AnchorQuestion::make(anchor, task);
  }
};

// Parsing rejects unknown fields and out-of-range values with a diagnostic
// naming the offending field.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config_file(const std::string& path);
void save_config_file(const ExperimentConfig& config, const std::string& path);

// FNV-1a over the canonical serialized form; stable across platforms.
std::uint64_t config_hash(const ExperimentConfig& config);

std::string candidate_mode_name(CandidateSetPolicy::Mode mode);

}  // namespace mmpo
