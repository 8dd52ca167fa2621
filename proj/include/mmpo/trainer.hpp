#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mmpo/advantage.hpp"
#include "mmpo/agent.hpp"
#include "mmpo/config.hpp"

namespace mmpo {

struct TaskGroup {
  SyntheticTask task;
  std::vector<Trajectory> members;
  AdvantageTable advantages;
};

// Rollout kernel: fills the (prompt, member) grid of trajectories against a
// read-only parameter snapshot.  parallelism 1 is the serial reference path;
// higher values run the same per-trajectory streams under OpenMP, so results
// are identical for every setting.
std::vector<TaskGroup> collect_rollout_batch(const PolicyParameters& params,
                                             const ExperimentConfig& config,
                                             std::uint64_t iteration,
                                             int parallelism);

// Frozen-policy evaluation: independent tasks and rollouts drawn from the
// "eval-task"/"eval-rollout" stream families.
std::vector<Trajectory> collect_eval_trajectories(const PolicyParameters& params,
                                                  const ExperimentConfig& config,
                                                  int num_episodes, int parallelism);

// num_tasks candidate sets of n rollouts each over a shared task, for
// best-of-N selection studies.
std::vector<std::vector<Trajectory>> collect_candidate_sets(
    const PolicyParameters& params, const ExperimentConfig& config, int num_tasks,
    int n, int parallelism);

struct BatchResult {
  double objective = 0.0;
  double kl = 0.0;
  std::vector<double> gradient;  // row-major V x D
};

// Eq.-style clipped surrogate over every memory-summary token with the
// turn-level advantage attached, minus beta times the exact per-context KL
// to the reference policy averaged over visited contexts.  Returns the
// analytic gradient of the whole expression.
BatchResult batch_objective_and_gradient(const PolicyParameters& params,
                                         const PolicyParameters& ref_params,
                                         const PolicyParameters& old_params,
                                         std::span<const TaskGroup> groups,
                                         const TrainerConfig& config,
                                         int parallelism = 1);

struct StepMetrics {
  std::uint64_t iteration = 0;
  double mean_outcome = 0.0;
  std::vector<double> mean_be_per_turn;
  double objective = 0.0;
  double kl = 0.0;
  double grad_norm = 0.0;
};

struct TrainerState {
  ExperimentConfig config;
  PolicyParameters params;
  PolicyParameters ref_params;
  std::uint64_t iteration = 0;
  // Adam moments, used only when config.trainer.use_adam is set.
  std::vector<double> adam_m;
  std::vector<double> adam_v;
};

TrainerState init_trainer(const ExperimentConfig& config);

// Observers invoked once per step / trajectory; both may be null.
using MetricsSink = std::function<void(const StepMetrics&)>;
using TrajectorySink = std::function<void(const Trajectory&)>;

StepMetrics train_step(TrainerState& state, int parallelism,
                       const TrajectorySink& trajectory_sink = nullptr);

struct TrainResult {
  std::vector<StepMetrics> history;
};

// Runs train_step for config.num_iterations steps; checkpoint_fn (if set) is
// called at every checkpoint interval and after the final step.
TrainResult train_loop(TrainerState& state, int parallelism,
                       const MetricsSink& metrics_sink = nullptr,
                       const TrajectorySink& trajectory_sink = nullptr,
                       const std::function<void(const TrainerState&)>& checkpoint_fn =
                           nullptr);

}  // namespace mmpo
