#include "mmpo/io.hpp"

#include <chrono>
#include <ctime>

#include "json.hpp"
#include "mmpo/errors.hpp"

namespace mmpo {

std::string metrics_record_line(const StepMetrics& metrics) {
  nlohmann::json doc;
  doc["iteration"] = metrics.iteration;
  doc["mean_outcome"] = metrics.mean_outcome;
  doc["mean_be_per_turn"] = metrics.mean_be_per_turn;
  doc["objective"] = metrics.objective;
  doc["kl"] = metrics.kl;
  doc["grad_norm"] = metrics.grad_norm;
  return doc.dump();
}

std::string trajectory_record_line(const Trajectory& traj,
                                   std::uint64_t config_hash) {
  nlohmann::json doc;
  doc["task_id"] = traj.task_id;
  doc["rng_key"] = traj.rng_key;
  doc["policy_version"] = traj.policy_version;
  doc["config_hash"] = config_hash;
  doc["outcome"] = traj.outcome_reward;
  auto turns = nlohmann::json::array();
  for (const TurnRecord& turn : traj.turns) {
    nlohmann::json t;
    t["memory"] = turn.memory.tokens;
    t["anchor_response"] = turn.anchor_response;
    t["be"] = turn.belief_entropy.value;
    t["be_per_token"] = turn.belief_entropy.per_token;
    turns.push_back(std::move(t));
  }
  doc["turns"] = std::move(turns);
  doc["answer"] = traj.answer.tokens;
  return doc.dump();
}

JsonlWriter::JsonlWriter(const std::string& path) : out_(path), path_(path) {
  if (!out_) throw IoError("cannot open for writing: " + path);
}

void JsonlWriter::write_line(const std::string& line) {
  out_ << line << "\n";
  if (!out_) throw IoError("write failed: " + path_);
}

TrajectoryLogSet read_trajectory_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory log: " + path);
  TrajectoryLogSet logs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
      TrajectorySummary s;
      s.task_id = doc.at("task_id").get<std::uint64_t>();
      s.outcome = doc.at("outcome").get<double>();
      s.config_hash = doc.at("config_hash").get<std::uint64_t>();
      for (const auto& turn : doc.at("turns")) {
        s.be_per_turn.push_back(turn.at("be").get<double>());
      }
      logs.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("trajectory log " + path + " line " + std::to_string(line_no) +
                    ": " + e.what());
    }
  }
  return logs;
}

std::vector<StepMetrics> read_metrics_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metrics log: " + path);
  std::vector<StepMetrics> history;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json doc = nlohmann::json::parse(line);
      StepMetrics m;
      m.iteration = doc.at("iteration").get<std::uint64_t>();
      m.mean_outcome = doc.at("mean_outcome").get<double>();
      m.mean_be_per_turn = doc.at("mean_be_per_turn").get<std::vector<double>>();
      m.objective = doc.at("objective").get<double>();
      m.kl = doc.at("kl").get<double>();
      m.grad_norm = doc.at("grad_norm").get<double>();
      history.push_back(std::move(m));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("metrics log " + path + " line " + std::to_string(line_no) +
                    ": " + e.what());
    }
  }
  return history;
}

void write_run_manifest(const std::string& path, std::uint64_t config_hash,
                        int parallelism, double wall_seconds) {
  nlohmann::json doc;
  doc["config_hash"] = config_hash;
  doc["parallelism"] = parallelism;
  doc["wall_seconds"] = wall_seconds;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  doc["finished_at"] = buf;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write run manifest: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace mmpo
