#include "mmpo/trainer.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

namespace mmpo {
namespace {

// Per-trajectory surrogate terms: sum over memory-summary tokens (and answer
// tokens when enabled) plus the list of visited contexts for the KL term.
struct TrajectoryContribution {
  double objective = 0.0;
  double kl_sum = 0.0;
  std::size_t num_contexts = 0;
  std::vector<double> surrogate_grad;  // d(sum of clipped terms)/dW
  std::vector<double> kl_grad;         // d(sum of per-context KL)/dW
};

TrajectoryContribution trajectory_contribution(const PolicyParameters& params,
                                               const PolicyParameters& ref_params,
                                               const Trajectory& traj,
                                               const AdvantageTable& advantages,
                                               int member_index,
                                               const TrainerConfig& config) {
  TrajectoryContribution out;
  out.surrogate_grad.assign(params.weights.size(), 0.0);
  out.kl_grad.assign(params.weights.size(), 0.0);
  const bool need_kl = config.beta != 0.0;

  auto add_token = [&](const TokenRecord& record, double advantage) {
    const TokenDistribution dist = token_distribution(params, record.context);
    const double logp_new = std::log(dist.probs[record.token]);
    const SurrogateTerm term = clipped_surrogate(advantage, logp_new,
                                                 record.log_prob, config.clip_epsilon);
    out.objective += term.objective;
    if (term.gradient_scale != 0.0) {
      accumulate_log_prob_gradient(params, record.context, record.token,
                                   term.gradient_scale, out.surrogate_grad);
    }
    if (need_kl) {
      out.kl_sum += kl_divergence(params, ref_params, record.context);
      accumulate_kl_gradient(params, ref_params, record.context, 1.0, out.kl_grad);
    }
    ++out.num_contexts;
  };

  const int T = advantages.num_turns;
  for (int t = 0; t < T; ++t) {
    const double advantage = advantages.turn(member_index, t);
    for (const TokenRecord& record : traj.turns[t].memory_generation) {
      add_token(record, advantage);
    }
  }
  if (config.advantage_on_answer_tokens) {
    const double advantage = advantages.turn(member_index, T - 1);
    for (const TokenRecord& record : traj.answer.generation) {
      add_token(record, advantage);
    }
  }
  return out;
}

}  // namespace

std::vector<TaskGroup> collect_rollout_batch(const PolicyParameters& params,
                                             const ExperimentConfig& config,
                                             std::uint64_t iteration,
                                             int parallelism) {
  const Vocabulary vocab = config.vocabulary();
  const FeatureSpec spec = config.feature_spec();
  const AnchorQuestion anchor = config.anchor_question();
  const RngStream root = RngStream::root(config.seed);

  const int prompts = config.trainer.prompts_per_batch;
  const int group = config.trainer.group_size;

  std::vector<TaskGroup> groups(prompts);
  for (int p = 0; p < prompts; ++p) {
    const std::uint64_t task_index =
        iteration * static_cast<std::uint64_t>(prompts) + p;
    RngStream task_stream = root.child("task-gen", task_index);
    groups[p].task = generate_task(config.task, vocab, task_stream, task_index);
    groups[p].members.resize(group);
  }

  // Every trajectory owns a stream named by its global index, so the result
  // does not depend on the thread count.
  const int total = prompts * group;
#pragma omp parallel for schedule(dynamic) num_threads(parallelism) if (parallelism > 1)
  for (int j = 0; j < total; ++j) {
    const int p = j / group;
    const int g = j % group;
    const std::uint64_t rollout_index =
        iteration * static_cast<std::uint64_t>(total) + j;
    groups[p].members[g] =
        rollout(params, spec, vocab, groups[p].task, anchor, config.candidate_set,
                root.child("rollout", rollout_index));
  }

  for (TaskGroup& g : groups) {
    g.advantages = build_advantage_table(g.members, config.trainer.alpha,
                                         config.trainer.std_floor);
  }
  return groups;
}

std::vector<Trajectory> collect_eval_trajectories(const PolicyParameters& params,
                                                  const ExperimentConfig& config,
                                                  int num_episodes, int parallelism) {
  const Vocabulary vocab = config.vocabulary();
  const FeatureSpec spec = config.feature_spec();
  const AnchorQuestion anchor = config.anchor_question();
  const RngStream root = RngStream::root(config.seed);

  std::vector<SyntheticTask> tasks(num_episodes);
  for (int e = 0; e < num_episodes; ++e) {
    RngStream task_stream = root.child("eval-task", e);
    tasks[e] = generate_task(config.task, vocab, task_stream, e);
  }
  std::vector<Trajectory> trajectories(num_episodes);
#pragma omp parallel for schedule(dynamic) num_threads(parallelism) if (parallelism > 1)
  for (int e = 0; e < num_episodes; ++e) {
    trajectories[e] = rollout(params, spec, vocab, tasks[e], anchor,
                              config.candidate_set, root.child("eval-rollout", e));
  }
  return trajectories;
}

std::vector<std::vector<Trajectory>> collect_candidate_sets(
    const PolicyParameters& params, const ExperimentConfig& config, int num_tasks,
    int n, int parallelism) {
  const Vocabulary vocab = config.vocabulary();
  const FeatureSpec spec = config.feature_spec();
  const AnchorQuestion anchor = config.anchor_question();
  const RngStream root = RngStream::root(config.seed);

  std::vector<std::vector<Trajectory>> sets(num_tasks);
  std::vector<SyntheticTask> tasks(num_tasks);
  for (int e = 0; e < num_tasks; ++e) {
    RngStream task_stream = root.child("bestof-task", e);
    tasks[e] = generate_task(config.task, vocab, task_stream, e);
    sets[e].resize(n);
  }
  const int total = num_tasks * n;
#pragma omp parallel for schedule(dynamic) num_threads(parallelism) if (parallelism > 1)
  for (int j = 0; j < total; ++j) {
    const int e = j / n;
    const int c = j % n;
    sets[e][c] = rollout(params, spec, vocab, tasks[e], anchor,
                         config.candidate_set, root.child("bestof-rollout", j));
  }
  return sets;
}

BatchResult batch_objective_and_gradient(const PolicyParameters& params,
                                         const PolicyParameters& ref_params,
                                         const PolicyParameters& old_params,
                                         std::span<const TaskGroup> groups,
                                         const TrainerConfig& config,
                                         int parallelism) {
  std::size_t num_trajectories = 0;
  for (const TaskGroup& g : groups) {
    for (const Trajectory& traj : g.members) {
      if (traj.policy_version != old_params.version) {
        throw VersionMismatch("batch_objective_and_gradient: trajectory version " +
                              std::to_string(traj.policy_version) +
                              " != old params version " +
                              std::to_string(old_params.version));
      }
      ++num_trajectories;
    }
  }
  if (num_trajectories == 0) {
    throw std::invalid_argument("batch_objective_and_gradient: empty batch");
  }

  std::vector<TrajectoryContribution> contributions(num_trajectories);
  struct Item {
    const Trajectory* traj;
    const AdvantageTable* advantages;
    int member;
  };
  std::vector<Item> items;
  items.reserve(num_trajectories);
  for (const TaskGroup& g : groups) {
    for (std::size_t m = 0; m < g.members.size(); ++m) {
      items.push_back(Item{&g.members[m], &g.advantages, static_cast<int>(m)});
    }
  }

  const int n = static_cast<int>(items.size());
#pragma omp parallel for schedule(dynamic) num_threads(parallelism) if (parallelism > 1)
  for (int i = 0; i < n; ++i) {
    contributions[i] = trajectory_contribution(params, ref_params, *items[i].traj,
                                               *items[i].advantages,
                                               items[i].member, config);
  }

  // Fixed-order reduction keeps the result independent of scheduling.
  BatchResult result;
  result.gradient.assign(params.weights.size(), 0.0);
  double objective_sum = 0.0;
  double kl_sum = 0.0;
  std::size_t context_count = 0;
  std::vector<double> kl_grad(params.weights.size(), 0.0);
  for (const TrajectoryContribution& c : contributions) {
    objective_sum += c.objective;
    kl_sum += c.kl_sum;
    context_count += c.num_contexts;
    for (std::size_t w = 0; w < result.gradient.size(); ++w) {
      result.gradient[w] += c.surrogate_grad[w];
      kl_grad[w] += c.kl_grad[w];
    }
  }

  const double traj_norm = 1.0 / static_cast<double>(num_trajectories);
  objective_sum *= traj_norm;
  for (double& g : result.gradient) g *= traj_norm;

  if (config.beta != 0.0 && context_count > 0) {
    const double ctx_norm = 1.0 / static_cast<double>(context_count);
    result.kl = kl_sum * ctx_norm;
    result.objective = objective_sum - config.beta * result.kl;
    for (std::size_t w = 0; w < result.gradient.size(); ++w) {
      result.gradient[w] -= config.beta * ctx_norm * kl_grad[w];
    }
  } else {
    result.kl = 0.0;
    result.objective = objective_sum;
  }
  return result;
}

TrainerState init_trainer(const ExperimentConfig& config) {
  TrainerState state;
  state.config = config;
  const FeatureSpec spec = config.feature_spec();
  state.params = PolicyParameters::zeros(config.vocabulary().size, spec.dim());
  state.ref_params = state.params;
  state.adam_m.assign(state.params.weights.size(), 0.0);
  state.adam_v.assign(state.params.weights.size(), 0.0);
  return state;
}

StepMetrics train_step(TrainerState& state, int parallelism,
                       const TrajectorySink& trajectory_sink) {
  const TrainerConfig& tc = state.config.trainer;
  const std::vector<TaskGroup> groups =
      collect_rollout_batch(state.params, state.config, state.iteration, parallelism);

  if (trajectory_sink) {
    for (const TaskGroup& g : groups) {
      for (const Trajectory& traj : g.members) trajectory_sink(traj);
    }
  }

  const PolicyParameters old_params = state.params;
  BatchResult batch;
  for (int epoch = 0; epoch < tc.epochs_per_batch; ++epoch) {
    batch = batch_objective_and_gradient(state.params, state.ref_params, old_params,
                                         groups, tc, parallelism);
    if (tc.use_adam) {
      const double t = static_cast<double>(state.iteration * tc.epochs_per_batch +
                                           epoch + 1);
      const double correction1 = 1.0 - std::pow(tc.adam_beta1, t);
      const double correction2 = 1.0 - std::pow(tc.adam_beta2, t);
      for (std::size_t w = 0; w < state.params.weights.size(); ++w) {
        const double g = batch.gradient[w];
        state.adam_m[w] = tc.adam_beta1 * state.adam_m[w] + (1.0 - tc.adam_beta1) * g;
        state.adam_v[w] = tc.adam_beta2 * state.adam_v[w] + (1.0 - tc.adam_beta2) * g * g;
        const double m_hat = state.adam_m[w] / correction1;
        const double v_hat = state.adam_v[w] / correction2;
        state.params.weights[w] +=
            tc.learning_rate * m_hat / (std::sqrt(v_hat) + tc.adam_epsilon);
      }
    } else {
      for (std::size_t w = 0; w < state.params.weights.size(); ++w) {
        state.params.weights[w] += tc.learning_rate * batch.gradient[w];
      }
    }
  }
  state.params.version += 1;

  StepMetrics metrics;
  metrics.iteration = state.iteration;
  metrics.objective = batch.objective;
  metrics.kl = batch.kl;
  double norm_sq = 0.0;
  for (double g : batch.gradient) norm_sq += g * g;
  metrics.grad_norm = std::sqrt(norm_sq);

  const int T = state.config.task.num_turns;
  metrics.mean_be_per_turn.assign(T, 0.0);
  double outcome_sum = 0.0;
  std::size_t count = 0;
  for (const TaskGroup& g : groups) {
    for (const Trajectory& traj : g.members) {
      outcome_sum += traj.outcome_reward;
      for (int t = 0; t < T; ++t) {
        metrics.mean_be_per_turn[t] += traj.turns[t].belief_entropy.value;
      }
      ++count;
    }
  }
  metrics.mean_outcome = outcome_sum / static_cast<double>(count);
  for (double& v : metrics.mean_be_per_turn) v /= static_cast<double>(count);

  state.iteration += 1;
  return metrics;
}

TrainResult train_loop(TrainerState& state, int parallelism,
                       const MetricsSink& metrics_sink,
                       const TrajectorySink& trajectory_sink,
                       const std::function<void(const TrainerState&)>& checkpoint_fn) {
  TrainResult result;
  const int iterations = state.config.num_iterations;
  if (checkpoint_fn && iterations == 0) checkpoint_fn(state);
  for (int i = 0; i < iterations; ++i) {
    StepMetrics metrics = train_step(state, parallelism, trajectory_sink);
    if (metrics_sink) metrics_sink(metrics);
    result.history.push_back(std::move(metrics));
    const bool at_interval =
        state.config.checkpoint_interval > 0 &&
        (i + 1) % state.config.checkpoint_interval == 0;
    if (checkpoint_fn && (at_interval || i + 1 == iterations)) {
      checkpoint_fn(state);
    }
  }
  return result;
}

}  // namespace mmpo
