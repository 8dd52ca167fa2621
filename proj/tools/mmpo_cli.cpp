// Command-line driver: train / eval / analyze / ablate subcommands over a
// JSON experiment config.  Exit codes: 0 ok, 2 config error, 3 data error,
// 4 internal invariant violation.

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmpo/errors.hpp"
#include "mmpo/runner.hpp"

namespace {

mmpo::ExperimentConfig load_config(const std::string& path,
                                   std::optional<std::uint64_t> seed_override) {
  mmpo::ExperimentConfig config = mmpo::load_config_file(path);
  if (seed_override.has_value()) config.seed = *seed_override;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale belief-entropy memory-policy trainer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  int parallelism = 1;

  auto add_common = [&](CLI::App* cmd, bool need_config) {
    auto* opt = cmd->add_option("--config", config_path, "experiment config file");
    if (need_config) opt->required();
    cmd->add_option("--seed", seed_override, "override the config seed");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--parallelism", parallelism,
                    "worker threads (1 = serial reference path)");
  };

  auto* train = app.add_subcommand("train", "run the training loop");
  add_common(train, true);

  auto* eval = app.add_subcommand("eval", "evaluate a frozen checkpoint");
  add_common(eval, true);
  std::string checkpoint_path;
  int num_episodes = -1;
  std::string eval_log;
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  eval->add_option("--episodes", num_episodes,
                   "episode count (default: config eval.num_episodes)");
  eval->add_option("--trajectory-log", eval_log,
                   "optional trajectory log output path");

  auto* analyze = app.add_subcommand("analyze", "build finding tables from a log");
  add_common(analyze, false);
  std::string log_path;
  double success_threshold = 1.0;
  int best_of_n = 5;
  analyze->add_option("--log", log_path, "trajectory log (jsonl)")->required();
  analyze->add_option("--success-threshold", success_threshold,
                      "outcome defining the success group");
  analyze->add_option("--best-of-n", best_of_n, "candidate set size for finding 3");

  auto* ablate = app.add_subcommand("ablate", "run the anchor-question grid");
  add_common(ablate, true);
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int ablate_eval_episodes = 300;
  ablate->add_option("--seeds", seeds, "seed list shared across variants");
  ablate->add_option("--eval-episodes", ablate_eval_episodes,
                     "eval episodes per cell");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      const mmpo::ExperimentConfig config = load_config(config_path, seed_override);
      const mmpo::TrainOutcome outcome = mmpo::run_train(config, out_dir, parallelism);
      std::cout << "train: iterations=" << outcome.iterations
                << " final_mean_outcome=" << outcome.final_mean_outcome
                << " checkpoint=" << outcome.final_checkpoint << "\n";
      return mmpo::kExitOk;
    }
    if (eval->parsed()) {
      const mmpo::ExperimentConfig config = load_config(config_path, seed_override);
      const int episodes =
          num_episodes >= 0 ? num_episodes : config.eval.num_episodes;
      const mmpo::EvalSummary summary =
          mmpo::run_eval(checkpoint_path, config, episodes, parallelism, eval_log);
      std::cout << "eval: episodes=" << summary.episodes
                << " mean_outcome=" << summary.mean_outcome;
      if (summary.best_of_n.has_value()) {
        std::cout << " best_of_" << summary.best_of_n->n
                  << "_selected=" << summary.best_of_n->comparison.mean_selected
                  << " uniform=" << summary.best_of_n->comparison.mean_uniform;
      }
      std::cout << "\n";
      return mmpo::kExitOk;
    }
    if (analyze->parsed()) {
      const int status =
          mmpo::run_analyze(log_path, out_dir, success_threshold, best_of_n);
      std::cout << "analyze: tables written to " << out_dir << "\n";
      return status;
    }
    if (ablate->parsed()) {
      const mmpo::ExperimentConfig config = load_config(config_path, seed_override);
      const int status = mmpo::run_ablate(config, seeds, ablate_eval_episodes,
                                          out_dir, parallelism);
      std::cout << "ablate: table written to " << out_dir << "/ablation.txt\n";
      return status;
    }
  } catch (const mmpo::ConfigParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return mmpo::kExitConfigError;
  } catch (const mmpo::CheckpointMismatch& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return mmpo::kExitConfigError;
  } catch (const mmpo::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return mmpo::kExitDataError;
  } catch (const mmpo::InsufficientData& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return mmpo::kExitDataError;
  } catch (const mmpo::DegenerateVariance& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return mmpo::kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return mmpo::kExitInternalError;
  }
  return mmpo::kExitInternalError;
}
