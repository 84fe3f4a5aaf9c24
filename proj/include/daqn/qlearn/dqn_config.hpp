#pragma once

#include <cstddef>

#include "daqn/nnkit/optimizer.hpp"
#include "daqn/nnkit/serialize.hpp"
#include "daqn/qlearn/policy.hpp"

namespace daqn {

struct DqnConfig {
  double gamma = 0.99;
  int batch_size = 32;
  std::size_t replay_capacity = 10000;
  /// Gradient steps between copies of the online weights into the target net.
  int target_sync_interval = 100;
  Exploration exploration = Boltzmann{};
  OptimizerConfig optimizer{};
  /// Transitions required before learning starts; -1 means max(batch_size, 100).
  int warmup_steps = -1;
  /// Environment steps per gradient step.
  int train_interval = 1;

  int effective_warmup() const { return warmup_steps < 0 ? std::max(batch_size, 100) : warmup_steps; }
  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  bool operator==(const DqnConfig&) const = default;
};

// { "gamma": 0.99, "batch_size": 32, "replay_capacity": 10000,
//   "target_sync_interval": 100, "warmup_steps": -1, "train_interval": 1,
//   "exploration": { "kind": "boltzmann", "temperature": 1.0 }
//                | { "kind": "epsilon_greedy", "eps_start": 1.0, "eps_end": 0.1, "decay_steps": 0 },
//   "optimizer": { "kind": "adam", "learning_rate": 0.001 } }
Json to_json(const DqnConfig& cfg);
DqnConfig dqn_config_from_json(const Json& j);

}  // namespace daqn
