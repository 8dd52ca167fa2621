#include "mmpo/analysis.hpp"

#include <omp.h>

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace mmpo {
namespace {

double mean_of(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

// Standard error of the mean (sample std / sqrt(n)).
double stderr_of(std::span<const double> xs, double mean) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

// Least-squares slope of y against turn index 1..T.
double ols_slope(std::span<const double> y) {
  const int n = static_cast<int>(y.size());
  if (n < 2) return 0.0;
  const double x_mean = (n + 1) / 2.0;
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = (i + 1) - x_mean;
    num += dx * y[i];
    den += dx * dx;
  }
  return num / den;
}

double student_t_two_sided(double t, double df) {
  if (!(df > 0.0)) return 1.0;
  boost::math::students_t dist(df);
  const double tail = boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return std::min(1.0, 2.0 * tail);
}

double student_t_one_sided_greater(double t, double df) {
  if (!(df > 0.0)) return 1.0;
  boost::math::students_t dist(df);
  return boost::math::cdf(boost::math::complement(dist, t));
}

GroupCurve build_curve(const std::vector<const TrajectorySummary*>& group) {
  GroupCurve curve;
  curve.count = static_cast<int>(group.size());
  if (group.empty()) return curve;
  const std::size_t turns = group[0]->be_per_turn.size();
  curve.mean_be.assign(turns, 0.0);
  curve.stderr_be.assign(turns, 0.0);
  for (std::size_t t = 0; t < turns; ++t) {
    std::vector<double> column;
    column.reserve(group.size());
    for (const TrajectorySummary* s : group) column.push_back(s->be_per_turn[t]);
    curve.mean_be[t] = mean_of(column);
    curve.stderr_be[t] = stderr_of(column, curve.mean_be[t]);
  }
  std::vector<double> slopes;
  slopes.reserve(group.size());
  for (const TrajectorySummary* s : group) slopes.push_back(ols_slope(s->be_per_turn));
  curve.mean_slope = mean_of(slopes);
  curve.stderr_slope = stderr_of(slopes, curve.mean_slope);
  return curve;
}

}  // namespace

TrajectorySummary summarize_trajectory(const Trajectory& traj,
                                       std::uint64_t config_hash) {
  TrajectorySummary s;
  s.task_id = traj.task_id;
  s.outcome = traj.outcome_reward;
  s.config_hash = config_hash;
  s.be_per_turn.reserve(traj.turns.size());
  for (const TurnRecord& turn : traj.turns) {
    s.be_per_turn.push_back(turn.belief_entropy.value);
  }
  return s;
}

EntropyTrajectoryStats entropy_trajectory_stats(const TrajectoryLogSet& logs,
                                                double success_threshold,
                                                int min_group) {
  std::vector<const TrajectorySummary*> success;
  std::vector<const TrajectorySummary*> failure;
  for (const TrajectorySummary& s : logs) {
    if (s.be_per_turn.empty()) continue;
    (s.outcome >= success_threshold ? success : failure).push_back(&s);
  }
  if (static_cast<int>(success.size()) < min_group ||
      static_cast<int>(failure.size()) < min_group) {
    throw InsufficientData("entropy_trajectory_stats: need at least " +
                           std::to_string(min_group) + " trajectories per group, got " +
                           std::to_string(success.size()) + " successes / " +
                           std::to_string(failure.size()) + " failures");
  }
  EntropyTrajectoryStats stats;
  stats.success = build_curve(success);
  stats.failure = build_curve(failure);
  return stats;
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("pearson: length mismatch");
  }
  const int n = static_cast<int>(x.size());
  if (n < 3) throw InsufficientData("pearson: need at least 3 points");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw DegenerateVariance("pearson: zero variance in an input");
  }
  Correlation c;
  c.n = n;
  c.r = sxy / std::sqrt(sxx * syy);
  const double r2 = std::min(c.r * c.r, 1.0 - 1e-15);
  const double t = c.r * std::sqrt((n - 2) / (1.0 - r2));
  c.p_value = student_t_two_sided(t, n - 2);
  return c;
}

DeltaBeCorrelation delta_be_correlation(const TrajectoryLogSet& logs,
                                        int min_count) {
  std::vector<double> delta_raw, delta_norm, outcome;
  for (const TrajectorySummary& s : logs) {
    if (s.be_per_turn.empty()) continue;
    const double d = s.be_per_turn.front() - s.be_per_turn.back();
    delta_raw.push_back(d);
    delta_norm.push_back(d / static_cast<double>(s.be_per_turn.size()));
    outcome.push_back(s.outcome);
  }
  if (static_cast<int>(delta_raw.size()) < min_count) {
    throw InsufficientData("delta_be_correlation: need at least " +
                           std::to_string(min_count) + " trajectories");
  }
  DeltaBeCorrelation result;
  result.raw = pearson(delta_raw, outcome);
  result.normalized = pearson(delta_norm, outcome);
  return result;
}

int best_of_n_select(std::span<const double> final_be) {
  if (final_be.empty()) {
    throw std::invalid_argument("best_of_n_select: empty candidate list");
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(final_be.size()); ++i) {
    if (final_be[i] < final_be[best]) best = i;
  }
  return best;
}

SelectionComparison best_of_n_comparison(
    std::span<const std::vector<TrajectorySummary>> candidate_sets) {
  std::vector<double> diffs;
  double selected_sum = 0.0;
  double uniform_sum = 0.0;
  for (const std::vector<TrajectorySummary>& set : candidate_sets) {
    if (set.empty()) continue;
    std::vector<double> final_be;
    final_be.reserve(set.size());
    double outcome_sum = 0.0;
    for (const TrajectorySummary& s : set) {
      final_be.push_back(s.be_per_turn.empty() ? 0.0 : s.be_per_turn.back());
      outcome_sum += s.outcome;
    }
    const int pick = best_of_n_select(final_be);
    const double uniform = outcome_sum / static_cast<double>(set.size());
    selected_sum += set[pick].outcome;
    uniform_sum += uniform;
    diffs.push_back(set[pick].outcome - uniform);
  }
  SelectionComparison cmp;
  cmp.num_tasks = static_cast<int>(diffs.size());
  if (cmp.num_tasks == 0) {
    throw InsufficientData("best_of_n_comparison: no candidate sets");
  }
  cmp.mean_selected = selected_sum / cmp.num_tasks;
  cmp.mean_uniform = uniform_sum / cmp.num_tasks;
  cmp.mean_diff = mean_of(diffs);
  const double se = stderr_of(diffs, cmp.mean_diff);
  if (se > 0.0) {
    cmp.t_statistic = cmp.mean_diff / se;
    cmp.p_one_sided = student_t_one_sided_greater(cmp.t_statistic, cmp.num_tasks - 1);
  } else {
    // All paired differences identical: degenerate but well-defined.
    cmp.t_statistic = 0.0;
    cmp.p_one_sided = cmp.mean_diff > 0.0 ? 0.0 : 1.0;
  }
  return cmp;
}

WelchResult welch_greater(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw InsufficientData("welch_greater: need at least 2 samples per side");
  }
  WelchResult w;
  w.mean_a = mean_of(a);
  w.mean_b = mean_of(b);
  const double se_a = stderr_of(a, w.mean_a);
  const double se_b = stderr_of(b, w.mean_b);
  const double var = se_a * se_a + se_b * se_b;
  if (var <= 0.0) {
    w.t_statistic = 0.0;
    w.p_one_sided = w.mean_a > w.mean_b ? 0.0 : 1.0;
    return w;
  }
  w.t_statistic = (w.mean_a - w.mean_b) / std::sqrt(var);
  const double df =
      var * var /
      (std::pow(se_a, 4) / (a.size() - 1) + std::pow(se_b, 4) / (b.size() - 1));
  w.p_one_sided = student_t_one_sided_greater(w.t_statistic, df);
  return w;
}

std::string ablation_variant_name(AblationVariant v) {
  switch (v) {
    case AblationVariant::kProgressGap: return "progress_gap";
    case AblationVariant::kGapOnly: return "gap_only";
    case AblationVariant::kDirectAnswer: return "direct_answer";
    case AblationVariant::kOutcomeOnly: return "outcome_only";
  }
  return "progress_gap";
}

std::vector<AblationRow> anchor_ablation(const ExperimentConfig& base,
                                         std::span<const AblationVariant> variants,
                                         std::span<const std::uint64_t> seeds,
                                         int eval_episodes, int parallelism) {
  struct Cell {
    double mean_outcome = 0.0;
    TrajectoryLogSet logs;
  };
  const int num_cells = static_cast<int>(variants.size() * seeds.size());
  std::vector<Cell> cells(num_cells);

  // Cells are independent training runs over shared seeds; the grid is
  // parallel across cells while each run stays serial inside.
#pragma omp parallel for schedule(dynamic) num_threads(parallelism) if (parallelism > 1)
  for (int c = 0; c < num_cells; ++c) {
    const AblationVariant variant = variants[c / seeds.size()];
    const std::uint64_t seed = seeds[c % seeds.size()];
    ExperimentConfig config = base;
    config.seed = seed;
    switch (variant) {
      case AblationVariant::kProgressGap:
        config.anchor = AnchorVariant::kProgressGap;
        break;
      case AblationVariant::kGapOnly:
        config.anchor = AnchorVariant::kGapOnly;
        break;
      case AblationVariant::kDirectAnswer:
        config.anchor = AnchorVariant::kDirectAnswer;
        break;
      case AblationVariant::kOutcomeOnly:
        // Standard outcome-only RLVR: entropy logged but carries no reward.
        config.anchor = AnchorVariant::kProgressGap;
        config.trainer.alpha = 0.0;
        break;
    }
    TrainerState state = init_trainer(config);
    train_loop(state, 1);
    const std::vector<Trajectory> eval_trajectories =
        collect_eval_trajectories(state.params, config, eval_episodes, 1);
    const std::uint64_t hash = config_hash(config);
    Cell& cell = cells[c];
    double outcome_sum = 0.0;
    for (const Trajectory& traj : eval_trajectories) {
      outcome_sum += traj.outcome_reward;
      cell.logs.push_back(summarize_trajectory(traj, hash));
    }
    cell.mean_outcome =
        eval_trajectories.empty() ? 0.0 : outcome_sum / eval_trajectories.size();
  }

  std::vector<AblationRow> rows;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    AblationRow row;
    row.variant = variants[v];
    TrajectoryLogSet pooled;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const Cell& cell = cells[v * seeds.size() + s];
      row.per_seed_outcome.push_back(cell.mean_outcome);
      pooled.insert(pooled.end(), cell.logs.begin(), cell.logs.end());
    }
    row.mean_outcome = mean_of(row.per_seed_outcome);
    try {
      row.delta_corr = delta_be_correlation(pooled).raw.r;
    } catch (const InsufficientData&) {
      row.delta_corr = std::nullopt;
    } catch (const DegenerateVariance&) {
      row.delta_corr = std::nullopt;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mmpo
