#include "mmpo/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>

namespace mmpo {
namespace {

namespace fs = std::filesystem;

std::string checkpoint_name(std::uint64_t iteration) {
  std::ostringstream name;
  name << "checkpoint_" << std::setw(6) << std::setfill('0') << iteration << ".json";
  return name.str();
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << std::fixed << v;
  return out.str();
}

}  // namespace

TrainOutcome run_train(const ExperimentConfig& config, const std::string& out_dir,
                       int parallelism) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  const std::uint64_t hash = config_hash(config);
  save_config_file(config, out_dir + "/config.json");

  JsonlWriter metrics_writer(out_dir + "/metrics.jsonl");
  JsonlWriter trajectory_writer(out_dir + "/trajectories.jsonl");

  TrainerState state = init_trainer(config);
  TrainOutcome outcome;
  outcome.config_hash = hash;

  const MetricsSink metrics_sink = [&](const StepMetrics& m) {
    metrics_writer.write_line(metrics_record_line(m));
    outcome.final_mean_outcome = m.mean_outcome;
  };
  const TrajectorySink trajectory_sink = [&](const Trajectory& traj) {
    trajectory_writer.write_line(trajectory_record_line(traj, hash));
  };
  const auto checkpoint_fn = [&](const TrainerState& s) {
    const std::string path = out_dir + "/" + checkpoint_name(s.iteration);
    save_checkpoint(s.params, hash, path);
    outcome.final_checkpoint = path;
  };

  train_loop(state, parallelism, metrics_sink, trajectory_sink, checkpoint_fn);
  if (outcome.final_checkpoint.empty()) {
    checkpoint_fn(state);
  }
  outcome.iterations = static_cast<int>(state.iteration);

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run_manifest(out_dir + "/run_manifest.json", hash, parallelism, wall);
  return outcome;
}

EvalSummary run_eval(const std::string& checkpoint_path,
                     const ExperimentConfig& config, int num_episodes,
                     int parallelism, const std::string& trajectory_log_path) {
  const std::uint64_t hash = config_hash(config);
  const PolicyParameters params = load_checkpoint(checkpoint_path, hash);

  EvalSummary summary;
  summary.episodes = num_episodes;
  if (num_episodes == 0) return summary;

  const std::vector<Trajectory> trajectories =
      collect_eval_trajectories(params, config, num_episodes, parallelism);

  std::unique_ptr<JsonlWriter> writer;
  if (!trajectory_log_path.empty()) {
    writer = std::make_unique<JsonlWriter>(trajectory_log_path);
  }
  const int T = config.task.num_turns;
  summary.mean_be_per_turn.assign(T, 0.0);
  double outcome_sum = 0.0;
  for (const Trajectory& traj : trajectories) {
    outcome_sum += traj.outcome_reward;
    for (int t = 0; t < T; ++t) {
      summary.mean_be_per_turn[t] += traj.turns[t].belief_entropy.value;
    }
    if (writer) writer->write_line(trajectory_record_line(traj, hash));
  }
  summary.mean_outcome = outcome_sum / num_episodes;
  for (double& v : summary.mean_be_per_turn) v /= num_episodes;

  if (config.eval.best_of_n > 1) {
    const int n = config.eval.best_of_n;
    const int num_tasks = num_episodes / n > 0 ? num_episodes / n : 1;
    const auto sets = collect_candidate_sets(params, config, num_tasks, n, parallelism);
    std::vector<std::vector<TrajectorySummary>> summaries;
    summaries.reserve(sets.size());
    for (const auto& set : sets) {
      std::vector<TrajectorySummary> s;
      for (const Trajectory& traj : set) s.push_back(summarize_trajectory(traj, hash));
      summaries.push_back(std::move(s));
    }
    BestOfNSummary best;
    best.n = n;
    best.comparison = best_of_n_comparison(summaries);
    summary.best_of_n = best;
  }
  return summary;
}

int run_analyze(const std::string& trajectory_log_path, const std::string& out_dir,
                double success_threshold, int best_of_n) {
  fs::create_directories(out_dir);
  const TrajectoryLogSet logs = read_trajectory_log(trajectory_log_path);

  int status = kExitOk;
  {
    std::ofstream out(out_dir + "/finding1.txt");
    out << "# per-turn mean belief entropy by outcome group\n";
    out << "# columns: group turn mean_be stderr_be\n";
    try {
      const EntropyTrajectoryStats stats =
          entropy_trajectory_stats(logs, success_threshold);
      const auto dump_group = [&](const char* name, const GroupCurve& curve) {
        for (std::size_t t = 0; t < curve.mean_be.size(); ++t) {
          out << name << " " << (t + 1) << " " << format_double(curve.mean_be[t])
              << " " << format_double(curve.stderr_be[t]) << "\n";
        }
        out << "# " << name << ": n=" << curve.count
            << " mean_slope=" << format_double(curve.mean_slope)
            << " stderr_slope=" << format_double(curve.stderr_slope) << "\n";
      };
      dump_group("success", stats.success);
      dump_group("failure", stats.failure);
    } catch (const InsufficientData& e) {
      out << "# insufficient data: " << e.what() << "\n";
      status = kExitDataError;
    }
  }
  {
    std::ofstream out(out_dir + "/finding2.txt");
    out << "# correlation of entropy reduction (turn 1 minus turn T) with outcome\n";
    out << "# columns: variant r p_value n\n";
    try {
      const DeltaBeCorrelation corr = delta_be_correlation(logs);
      out << "raw " << format_double(corr.raw.r) << " "
          << format_double(corr.raw.p_value) << " " << corr.raw.n << "\n";
      out << "per_turn_normalized " << format_double(corr.normalized.r) << " "
          << format_double(corr.normalized.p_value) << " " << corr.normalized.n
          << "\n";
    } catch (const InsufficientData& e) {
      out << "# insufficient data: " << e.what() << "\n";
      status = kExitDataError;
    } catch (const DegenerateVariance& e) {
      out << "# degenerate variance: " << e.what() << "\n";
      status = kExitDataError;
    }
  }
  {
    std::ofstream out(out_dir + "/finding3.txt");
    out << "# best-of-N selection by lowest final-turn belief entropy\n";
    out << "# columns: n_tasks mean_selected mean_uniform mean_diff t p_one_sided\n";
    if (best_of_n > 1) {
      // Group consecutive records with the same task id into candidate sets.
      std::vector<std::vector<TrajectorySummary>> sets;
      for (const TrajectorySummary& s : logs) {
        if (sets.empty() || sets.back().back().task_id != s.task_id ||
            static_cast<int>(sets.back().size()) >= best_of_n) {
          sets.emplace_back();
        }
        sets.back().push_back(s);
      }
      sets.erase(std::remove_if(sets.begin(), sets.end(),
                                [&](const auto& s) {
                                  return static_cast<int>(s.size()) != best_of_n;
                                }),
                 sets.end());
      try {
        const SelectionComparison cmp = best_of_n_comparison(sets);
        out << cmp.num_tasks << " " << format_double(cmp.mean_selected) << " "
            << format_double(cmp.mean_uniform) << " " << format_double(cmp.mean_diff)
            << " " << format_double(cmp.t_statistic) << " "
            << format_double(cmp.p_one_sided) << "\n";
      } catch (const InsufficientData& e) {
        out << "# insufficient data: " << e.what() << "\n";
        status = kExitDataError;
      }
    } else {
      out << "# best-of-n disabled (n <= 1)\n";
    }
  }
  return status;
}

int run_ablate(const ExperimentConfig& base, std::span<const std::uint64_t> seeds,
               int eval_episodes, const std::string& out_dir, int parallelism) {
  fs::create_directories(out_dir);
  const AblationVariant variants[] = {
      AblationVariant::kOutcomeOnly,
      AblationVariant::kDirectAnswer,
      AblationVariant::kGapOnly,
      AblationVariant::kProgressGap,
  };
  const std::vector<AblationRow> rows =
      anchor_ablation(base, variants, seeds, eval_episodes, parallelism);

  std::ofstream out(out_dir + "/ablation.txt");
  out << "# anchor-question ablation\n";
  out << "# columns: variant mean_outcome delta_be_corr per_seed_outcomes...\n";
  for (const AblationRow& row : rows) {
    out << ablation_variant_name(row.variant) << " "
        << format_double(row.mean_outcome) << " ";
    if (row.delta_corr.has_value()) {
      out << format_double(*row.delta_corr);
    } else {
      out << "--";
    }
    for (double seed_outcome : row.per_seed_outcome) {
      out << " " << format_double(seed_outcome);
    }
    out << "\n";
  }
  return kExitOk;
}

}  // namespace mmpo
