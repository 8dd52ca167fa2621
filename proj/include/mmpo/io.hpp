#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "mmpo/analysis.hpp"
#include "mmpo/trainer.hpp"

namespace mmpo {

// Line-delimited JSON records.  They carry no timestamps; wall-clock data
// lives only in the sidecar run manifest so outputs stay byte-reproducible.
std::string metrics_record_line(const StepMetrics& metrics);
std::string trajectory_record_line(const Trajectory& traj,
                                   std::uint64_t config_hash);

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path);
  void write_line(const std::string& line);

 private:
  std::ofstream out_;
  std::string path_;
};

TrajectoryLogSet read_trajectory_log(const std::string& path);
std::vector<StepMetrics> read_metrics_log(const std::string& path);

void write_run_manifest(const std::string& path, std::uint64_t config_hash,
                        int parallelism, double wall_seconds);

}  // namespace mmpo
