// runner.hpp - experiment orchestration: dispatch, CSV results, JSON manifest
#ifndef WICKBENCH_RUNNER_HPP
#define WICKBENCH_RUNNER_HPP

#include <string>
#include <vector>

#include "wickbench/config.hpp"

namespace wickbench {

struct RunOptions {
  std::string out_dir;  // empty -> config.output
  int jobs = 0;         // 0 -> hardware concurrency
  unsigned long seed = 0;  // 0 -> config.seed
};

struct RunResult {
  int exit_code = 0;
  std::string csv_path;
  std::string manifest_path;
  std::vector<std::string> messages;
};

// Executes one experiment: writes results.csv and manifest.json under the
// output directory.  Deterministic for fixed (config, seed) at any job count.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::string format_double(double v);  // %.17g, locale-independent

}  // namespace wickbench

#endif
