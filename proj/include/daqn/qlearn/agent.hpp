#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "daqn/nnkit/network.hpp"
#include "daqn/nnkit/optimizer.hpp"
#include "daqn/qlearn/dqn_config.hpp"
#include "daqn/qlearn/replay.hpp"

namespace daqn {

/// DQN learner: online net theta, target net theta-minus, replay memory and
/// optimizer. States passed in are already normalized.
class Agent {
 public:
  /// The target net starts as a copy of `online`. `seed` drives exploration
  /// and replay sampling.
  Agent(Network online, DqnConfig cfg, std::uint64_t seed);

  Network& online() { return online_; }
  const Network& target() const { return target_; }
  ReplayMemory& memory() { return memory_; }
  const ReplayMemory& memory() const { return memory_; }
  const DqnConfig& config() const { return cfg_; }
  Rng& rng() { return rng_; }

  int n_actions() const;
  Eigen::VectorXd q_values(const Tensor& state);

  /// Greedy argmax (lowest index on ties) or an exploratory draw whose
  /// schedule is indexed by `step`.
  int select_action(const Tensor& state, bool explore, long step = 0);

  /// y = r for terminal transitions, else r + gamma * max_a Q(s', a; theta-minus).
  Eigen::VectorXd compute_targets(std::span<const Transition* const> batch);

  /// One optimizer step on mean (y - Q(s, a; theta))^2 with y held constant.
  /// Returns the loss before the update.
  double td_train_step(std::span<const Transition* const> batch);

  void sync_target();
  long gradient_steps() const { return gradient_steps_; }

 private:
  Eigen::MatrixXd stack_states(std::span<const Transition* const> batch, bool next) const;

  DqnConfig cfg_;
  Network online_;
  Network target_;
  ReplayMemory memory_;
  Optimizer optimizer_;
  Rng rng_;
  long gradient_steps_ = 0;
};

}  // namespace daqn
