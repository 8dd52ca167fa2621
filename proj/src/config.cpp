#include "mmpo/config.hpp"

#include <fstream>
#include <set>

#include "mmpo/errors.hpp"
#include "mmpo/rng.hpp"

namespace mmpo {
namespace {

class FieldReader {
 public:
  FieldReader(const nlohmann::json& doc, std::string prefix)
      : doc_(doc), prefix_(std::move(prefix)) {
    if (!doc_.is_object()) {
      throw ConfigParseError(label("") + "expected an object");
    }
  }

  ~FieldReader() = default;

  template <typename T>
  void read(const char* field, T* out) {
    seen_.insert(field);
    if (!doc_.contains(field)) return;
    try {
      *out = doc_.at(field).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigParseError(label(field) + "has the wrong type");
    }
  }

  const nlohmann::json* child(const char* field) {
    seen_.insert(field);
    if (!doc_.contains(field)) return nullptr;
    return &doc_.at(field);
  }

  void reject_unknown() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.contains(key)) {
        throw ConfigParseError(label(key.c_str()) + "is not a recognized field");
      }
    }
  }

  std::string label(const char* field) const {
    std::string full = prefix_.empty() ? "" : prefix_ + ".";
    full += field;
    return "config field '" + full + "' ";
  }

 private:
  const nlohmann::json& doc_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigParseError(message);
}

}  // namespace

std::string candidate_mode_name(CandidateSetPolicy::Mode mode) {
  switch (mode) {
    case CandidateSetPolicy::Mode::kFullVocab: return "full_vocab";
    case CandidateSetPolicy::Mode::kTopK: return "top_k";
    case CandidateSetPolicy::Mode::kTopP: return "top_p";
  }
  return "full_vocab";
}

std::string anchor_variant_name(AnchorVariant v) {
  switch (v) {
    case AnchorVariant::kProgressGap: return "progress_gap";
    case AnchorVariant::kGapOnly: return "gap_only";
    case AnchorVariant::kDirectAnswer: return "direct_answer";
  }
  return "progress_gap";
}

AnchorVariant anchor_variant_from_name(const std::string& name) {
  if (name == "progress_gap") return AnchorVariant::kProgressGap;
  if (name == "gap_only") return AnchorVariant::kGapOnly;
  if (name == "direct_answer") return AnchorVariant::kDirectAnswer;
  throw ConfigParseError("config field 'anchor.variant' has unknown value '" +
                         name + "'");
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc) {
  ExperimentConfig config;
  FieldReader top(doc, "");

  if (const nlohmann::json* task = top.child("task")) {
    FieldReader r(*task, "task");
    r.read("num_facts", &config.task.num_facts);
    r.read("fact_domain", &config.task.fact_domain);
    r.read("num_turns", &config.task.num_turns);
    r.read("chunk_length", &config.task.chunk_length);
    r.read("memory_budget", &config.task.memory_budget);
    r.read("extra_distractors", &config.task.extra_distractors);
    r.read("distractor_rate", &config.task.distractor_rate);
    r.read("anchor_max_len", &config.task.anchor_max_len);
    r.reject_unknown();
    require(config.task.num_facts >= 1, r.label("num_facts") + "must be >= 1");
    require(config.task.fact_domain >= 2, r.label("fact_domain") + "must be >= 2");
    require(config.task.num_turns >= config.task.num_facts,
            r.label("num_turns") + "must be >= num_facts");
    require(config.task.chunk_length >= 1, r.label("chunk_length") + "must be >= 1");
    require(config.task.memory_budget >= 1, r.label("memory_budget") + "must be >= 1");
    require(config.task.extra_distractors >= 0,
            r.label("extra_distractors") + "must be >= 0");
    require(config.task.distractor_rate >= 0.0 && config.task.distractor_rate <= 1.0,
            r.label("distractor_rate") + "must be in [0, 1]");
    require(config.task.anchor_max_len >= 1,
            r.label("anchor_max_len") + "must be >= 1");
  }

  if (const nlohmann::json* trainer = top.child("trainer")) {
    FieldReader r(*trainer, "trainer");
    r.read("alpha", &config.trainer.alpha);
    r.read("beta", &config.trainer.beta);
    r.read("clip_epsilon", &config.trainer.clip_epsilon);
    r.read("learning_rate", &config.trainer.learning_rate);
    r.read("std_floor", &config.trainer.std_floor);
    r.read("group_size", &config.trainer.group_size);
    r.read("prompts_per_batch", &config.trainer.prompts_per_batch);
    r.read("epochs_per_batch", &config.trainer.epochs_per_batch);
    r.read("advantage_on_answer_tokens", &config.trainer.advantage_on_answer_tokens);
    r.read("use_adam", &config.trainer.use_adam);
    r.read("adam_beta1", &config.trainer.adam_beta1);
    r.read("adam_beta2", &config.trainer.adam_beta2);
    r.read("adam_epsilon", &config.trainer.adam_epsilon);
    r.reject_unknown();
    require(config.trainer.alpha >= 0.0, r.label("alpha") + "must be >= 0");
    require(config.trainer.beta >= 0.0, r.label("beta") + "must be >= 0");
    require(config.trainer.clip_epsilon > 0.0,
            r.label("clip_epsilon") + "must be > 0");
    require(config.trainer.learning_rate >= 0.0,
            r.label("learning_rate") + "must be >= 0");
    require(config.trainer.std_floor > 0.0, r.label("std_floor") + "must be > 0");
    require(config.trainer.group_size >= 2, r.label("group_size") + "must be >= 2");
    require(config.trainer.prompts_per_batch >= 1,
            r.label("prompts_per_batch") + "must be >= 1");
    require(config.trainer.epochs_per_batch >= 1,
            r.label("epochs_per_batch") + "must be >= 1");
  }

  if (const nlohmann::json* anchor = top.child("anchor")) {
    FieldReader r(*anchor, "anchor");
    std::string variant = anchor_variant_name(config.anchor);
    r.read("variant", &variant);
    r.reject_unknown();
    config.anchor = anchor_variant_from_name(variant);
  }

  if (const nlohmann::json* cand = top.child("candidate_set")) {
    FieldReader r(*cand, "candidate_set");
    std::string mode = candidate_mode_name(config.candidate_set.mode);
    r.read("mode", &mode);
    r.read("k", &config.candidate_set.k);
    r.read("p", &config.candidate_set.p);
    r.reject_unknown();
    if (mode == "full_vocab") {
      config.candidate_set.mode = CandidateSetPolicy::Mode::kFullVocab;
    } else if (mode == "top_k") {
      config.candidate_set.mode = CandidateSetPolicy::Mode::kTopK;
      require(config.candidate_set.k >= 1, r.label("k") + "must be >= 1");
    } else if (mode == "top_p") {
      config.candidate_set.mode = CandidateSetPolicy::Mode::kTopP;
      require(config.candidate_set.p > 0.0 && config.candidate_set.p <= 1.0,
              r.label("p") + "must be in (0, 1]");
    } else {
      throw ConfigParseError(r.label("mode") + "has unknown value '" + mode + "'");
    }
  }

  if (const nlohmann::json* eval = top.child("eval")) {
    FieldReader r(*eval, "eval");
    r.read("num_episodes", &config.eval.num_episodes);
    r.read("best_of_n", &config.eval.best_of_n);
    r.reject_unknown();
    require(config.eval.num_episodes >= 0, r.label("num_episodes") + "must be >= 0");
    require(config.eval.best_of_n >= 0, r.label("best_of_n") + "must be >= 0");
  }

  top.read("seed", &config.seed);
  top.read("num_iterations", &config.num_iterations);
  top.read("checkpoint_interval", &config.checkpoint_interval);
  top.reject_unknown();
  require(config.num_iterations >= 0,
          "config field 'num_iterations' must be >= 0");
  require(config.checkpoint_interval >= 1,
          "config field 'checkpoint_interval' must be >= 1");
  return config;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& config) {
  nlohmann::json doc;
  doc["task"] = {
      {"num_facts", config.task.num_facts},
      {"fact_domain", config.task.fact_domain},
      {"num_turns", config.task.num_turns},
      {"chunk_length", config.task.chunk_length},
      {"memory_budget", config.task.memory_budget},
      {"extra_distractors", config.task.extra_distractors},
      {"distractor_rate", config.task.distractor_rate},
      {"anchor_max_len", config.task.anchor_max_len},
  };
  doc["trainer"] = {
      {"alpha", config.trainer.alpha},
      {"beta", config.trainer.beta},
      {"clip_epsilon", config.trainer.clip_epsilon},
      {"learning_rate", config.trainer.learning_rate},
      {"std_floor", config.trainer.std_floor},
      {"group_size", config.trainer.group_size},
      {"prompts_per_batch", config.trainer.prompts_per_batch},
      {"epochs_per_batch", config.trainer.epochs_per_batch},
      {"advantage_on_answer_tokens", config.trainer.advantage_on_answer_tokens},
      {"use_adam", config.trainer.use_adam},
      {"adam_beta1", config.trainer.adam_beta1},
      {"adam_beta2", config.trainer.adam_beta2},
      {"adam_epsilon", config.trainer.adam_epsilon},
  };
  doc["anchor"] = {{"variant", anchor_variant_name(config.anchor)}};
  doc["candidate_set"] = {
      {"mode", candidate_mode_name(config.candidate_set.mode)},
      {"k", config.candidate_set.k},
      {"p", config.candidate_set.p},
  };
  doc["eval"] = {
      {"num_episodes", config.eval.num_episodes},
      {"best_of_n", config.eval.best_of_n},
  };
  doc["seed"] = config.seed;
  doc["num_iterations"] = config.num_iterations;
  doc["checkpoint_interval"] = config.checkpoint_interval;
  return doc;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigParseError("config file " + path + ": " + e.what());
  }
  return experiment_config_from_json(doc);
}

void save_config_file(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path);
  out << experiment_config_to_json(config).dump(2) << "\n";
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  return fnv1a64(experiment_config_to_json(config).dump());
}

}  // namespace mmpo
