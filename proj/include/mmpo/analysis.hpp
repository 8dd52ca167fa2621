#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmpo/trainer.hpp"

namespace mmpo {

// Reduced per-trajectory record consumed by every analysis.
struct TrajectorySummary {
  std::uint64_t task_id = 0;
  double outcome = 0.0;
  std::vector<double> be_per_turn;
  std::uint64_t config_hash = 0;
};

using TrajectoryLogSet = std::vector<TrajectorySummary>;

TrajectorySummary summarize_trajectory(const Trajectory& traj,
                                       std::uint64_t config_hash);

struct GroupCurve {
  int count = 0;
  std::vector<double> mean_be;
  std::vector<double> stderr_be;
  double mean_slope = 0.0;    // mean of per-trajectory least-squares slopes
  double stderr_slope = 0.0;
};

struct EntropyTrajectoryStats {
  GroupCurve success;
  GroupCurve failure;
};

// Splits by outcome >= success_threshold and reports per-turn entropy curves
// and slope statistics per group.  Throws InsufficientData when either group
// has fewer than min_group trajectories.
EntropyTrajectoryStats entropy_trajectory_stats(const TrajectoryLogSet& logs,
                                                double success_threshold,
                                                int min_group = 30);

struct Correlation {
  double r = 0.0;
  double p_value = 1.0;  // two-sided, t-approximation
  int n = 0;
};

Correlation pearson(std::span<const double> x, std::span<const double> y);

struct DeltaBeCorrelation {
  Correlation raw;         // delta = BE(turn 1) - BE(turn T)
  Correlation normalized;  // delta divided by trajectory length
};

// Correlation between total entropy reduction and outcome reward.
DeltaBeCorrelation delta_be_correlation(const TrajectoryLogSet& logs,
                                        int min_count = 30);

// Index of the candidate with the lowest final-turn belief entropy; ties by
// lowest index.
int best_of_n_select(std::span<const double> final_be);

struct SelectionComparison {
  int num_tasks = 0;
  double mean_selected = 0.0;
  double mean_uniform = 0.0;  // expectation of uniform selection = candidate mean
  double mean_diff = 0.0;
  double t_statistic = 0.0;
  double p_one_sided = 1.0;   // H1: selected > uniform
};

// Paired comparison of lowest-entropy selection against the uniform-selection
// expectation over per-task candidate sets.
SelectionComparison best_of_n_comparison(
    std::span<const std::vector<TrajectorySummary>> candidate_sets);

// One-sided Welch test of mean(a) > mean(b) on raw samples.
struct WelchResult {
  double mean_a = 0.0, mean_b = 0.0;
  double t_statistic = 0.0;
  double p_one_sided = 1.0;
};
WelchResult welch_greater(std::span<const double> a, std::span<const double> b);

enum class AblationVariant { kProgressGap, kGapOnly, kDirectAnswer, kOutcomeOnly };

std::string ablation_variant_name(AblationVariant v);

struct AblationRow {
  AblationVariant variant;
  double mean_outcome = 0.0;               // mean over seeds of final eval outcome
  std::vector<double> per_seed_outcome;
  std::optional<double> delta_corr;        // pooled over seeds; BE always logged
};

// Trains and evaluates every (variant, seed) cell with shared seeds.  Cells
// are independent runs and may execute concurrently; results are merged in
// grid order.
std::vector<AblationRow> anchor_ablation(const ExperimentConfig& base,
                                         std::span<const AblationVariant> variants,
                                         std::span<const std::uint64_t> seeds,
                                         int eval_episodes, int parallelism);

}  // namespace mmpo
