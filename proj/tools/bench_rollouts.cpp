// Benchmark: serial reference path vs OpenMP kernels for rollout collection
// and batch gradient computation.  Verifies that every thread count produces
// bit-identical results before reporting timings.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "mmpo/trainer.hpp"

namespace {

double time_seconds(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

bool groups_equal(const std::vector<mmpo::TaskGroup>& a,
                  const std::vector<mmpo::TaskGroup>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t g = 0; g < a.size(); ++g) {
    if (a[g].members.size() != b[g].members.size()) return false;
    if (a[g].advantages.turn_advantages != b[g].advantages.turn_advantages) {
      return false;
    }
    for (std::size_t m = 0; m < a[g].members.size(); ++m) {
      const mmpo::Trajectory& x = a[g].members[m];
      const mmpo::Trajectory& y = b[g].members[m];
      if (x.outcome_reward != y.outcome_reward) return false;
      if (x.answer.tokens != y.answer.tokens) return false;
      for (std::size_t t = 0; t < x.turns.size(); ++t) {
        if (x.turns[t].memory.tokens != y.turns[t].memory.tokens) return false;
        if (x.turns[t].belief_entropy.value != y.turns[t].belief_entropy.value) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

int main() {
  mmpo::ExperimentConfig config;
  config.task.num_facts = 2;
  config.task.num_turns = 6;
  config.task.chunk_length = 32;
  config.task.memory_budget = 12;
  config.trainer.group_size = 16;
  config.trainer.prompts_per_batch = 32;
  config.seed = 12345;

  mmpo::TrainerState state = mmpo::init_trainer(config);
  // A couple of warm-up steps so the weights (and thus the workload) are
  // representative of mid-training batches.
  for (int i = 0; i < 2; ++i) mmpo::train_step(state, 1);

  const std::vector<int> thread_counts = {1, 2, 4, 8};
  const int repeats = 5;

  std::printf("rollout batch: %d prompts x %d members, T=%d\n",
              config.trainer.prompts_per_batch, config.trainer.group_size,
              config.task.num_turns);

  std::vector<mmpo::TaskGroup> reference;
  double serial_rollout = 0.0;
  double serial_grad = 0.0;
  for (int threads : thread_counts) {
    std::vector<mmpo::TaskGroup> groups;
    const double rollout_time = time_seconds([&] {
      for (int r = 0; r < repeats; ++r) {
        groups = mmpo::collect_rollout_batch(state.params, config, state.iteration,
                                             threads);
      }
    });
    mmpo::BatchResult batch;
    const double grad_time = time_seconds([&] {
      for (int r = 0; r < repeats; ++r) {
        batch = mmpo::batch_objective_and_gradient(state.params, state.ref_params,
                                                   state.params, groups,
                                                   config.trainer, threads);
      }
    });
    if (threads == 1) {
      reference = groups;
      serial_rollout = rollout_time;
      serial_grad = grad_time;
    } else if (!groups_equal(reference, groups)) {
      std::printf("FAIL: thread count %d changed rollout results\n", threads);
      return 1;
    }
    std::printf(
        "threads=%d  rollout %.3fs (x%.2f)  gradient %.3fs (x%.2f)\n", threads,
        rollout_time, serial_rollout / rollout_time, grad_time,
        serial_grad / grad_time);
  }
  std::printf("all thread counts bit-identical to the serial reference\n");
  return 0;
}
