#pragma once

#include <variant>

#include <Eigen/Core>

#include "daqn/nnkit/layers.hpp"

namespace daqn {

/// Random action with probability epsilon, annealed linearly from eps_start
/// to eps_end over decay_steps environment steps, constant afterwards.
/// decay_steps = 0 means a tenth of the run's total steps.
struct EpsGreedy {
  double eps_start = 1.0;
  double eps_end = 0.1;
  long decay_steps = 0;

  double epsilon_at(long step) const;
  bool operator==(const EpsGreedy&) const = default;
};

/// Samples from softmax(Q / temperature).
struct Boltzmann {
  double temperature = 1.0;
  bool operator==(const Boltzmann&) const = default;
};

using Exploration = std::variant<EpsGreedy, Boltzmann>;

/// Argmax with the lowest index winning ties.
int greedy_action(const Eigen::Ref<const Eigen::VectorXd>& q);

Eigen::VectorXd boltzmann_probabilities(const Eigen::Ref<const Eigen::VectorXd>& q, double temperature);

/// Exploratory draw for environment step `step`.
int explore_action(const Exploration& policy, const Eigen::Ref<const Eigen::VectorXd>& q, long step, Rng& rng);

}  // namespace daqn
