#pragma once

#include <optional>
#include <string>

#include "mmpo/analysis.hpp"
#include "mmpo/config.hpp"
#include "mmpo/io.hpp"

namespace mmpo {

// CLI exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitInternalError = 4;

struct TrainOutcome {
  std::uint64_t config_hash = 0;
  int iterations = 0;
  double final_mean_outcome = 0.0;
  std::string final_checkpoint;
};

// Writes config.json, metrics.jsonl, trajectories.jsonl, checkpoints and the
// run manifest into out_dir.
TrainOutcome run_train(const ExperimentConfig& config, const std::string& out_dir,
                       int parallelism);

struct BestOfNSummary {
  int n = 0;
  SelectionComparison comparison;
};

struct EvalSummary {
  int episodes = 0;
  double mean_outcome = 0.0;
  std::vector<double> mean_be_per_turn;
  std::optional<BestOfNSummary> best_of_n;
};

// Frozen-policy evaluation of a checkpoint; optionally writes a trajectory
// log for downstream analysis.
EvalSummary run_eval(const std::string& checkpoint_path,
                     const ExperimentConfig& config, int num_episodes,
                     int parallelism,
                     const std::string& trajectory_log_path = "");

// Writes finding1.txt / finding2.txt / finding3.txt tables built from a
// trajectory log.
int run_analyze(const std::string& trajectory_log_path, const std::string& out_dir,
                double success_threshold, int best_of_n);

// Four-variant ablation grid; writes ablation.txt.
int run_ablate(const ExperimentConfig& base, std::span<const std::uint64_t> seeds,
               int eval_episodes, const std::string& out_dir, int parallelism);

}  // namespace mmpo
