#pragma once

#include <functional>
#include <span>
#include <vector>

#include "daqn/envs/environment.hpp"
#include "daqn/envs/glyph_duel.hpp"
#include "daqn/nnkit/normalization.hpp"
#include "daqn/qlearn/agent.hpp"

namespace daqn {

/// Called after the environment step count reaches a milestone; returns the
/// metric recorded for it.
using EvalHook = std::function<double(Agent&, long step)>;

struct MilestoneValue {
  long step = 0;
  double value = 0.0;
};

struct TrainingLog {
  std::vector<MilestoneValue> evals;
  std::vector<double> episode_returns;
  long env_steps = 0;
  long gradient_steps = 0;
};

struct TrainingOptions {
  long total_steps = 0;
  std::vector<long> milestones;  // strictly increasing, each <= total_steps
  Normalization normalization;   // applied to every observation
};

/// Acts with exploration, stores transitions, trains every train_interval
/// steps once warmup is met and syncs the target net on schedule. Training
/// steps count environment steps. A time-limit truncation resets the episode
/// but keeps the bootstrap term for its last transition.
TrainingLog run_training(Agent& agent, Environment& env, const TrainingOptions& opts, const EvalHook& eval);

/// Mean undiscounted return of `episodes` greedy episodes.
double evaluate_returns(Agent& agent, Environment& env, int episodes, const Normalization& norm = {});

/// Fraction of test images whose greedy action beats the shown sign.
double evaluate_win_ratio(Agent& agent, const GlyphTestSet& test, const Normalization& norm = {});

}  // namespace daqn
