#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "daqn/qlearn/training.hpp"
#include "daqn/xprun/config.hpp"
#include "daqn/xprun/metrics.hpp"

namespace daqn {

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<MilestoneValue> evals;
  std::vector<double> ae_curve;  // empty for dqn
  long gradient_steps = 0;
  double wall_seconds = 0.0;
};

struct RunMetrics {
  EnvKind env = EnvKind::cartpole;
  Method method = Method::dqn;
  std::string config_hash;
  std::vector<SeedRun> runs;

  /// eval_reward for cart-pole, win_ratio for the glyph game.
  std::string eval_metric() const;
  /// Deterministic CSV rows (wall-clock times are not included).
  std::vector<MetricRow> rows() const;
};

struct RunOptions {
  /// When set: metrics.csv (rewritten after every seed), config.json,
  /// summary.json and per-seed checkpoints land here.
  std::optional<std::filesystem::path> out_dir;
  bool save_datasets = false;
  /// Seeds run on this many worker threads; results merge in seed order.
  int jobs = 1;
  /// Called from worker threads, one call at a time.
  std::function<void(const std::string&)> log;
};

/// A seed failed after others completed; the partial CSV has been written
/// with a run_failed row.
class RunFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One seed of the pipeline. daqn methods: collect pre-training data, train
/// the auto-encoder, transfer, then DQN; dqn: fresh network, then DQN. Vector
/// states are standardized with statistics of a random-policy dataset for
/// every method.
SeedRun run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& opts = {});

RunMetrics run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

}  // namespace daqn
