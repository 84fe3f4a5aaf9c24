#pragma once

#include <cstdint>
#include <stdexcept>

#include "daqn/nnkit/tensor.hpp"

namespace daqn {

struct StepResult {
  Tensor state;
  double reward = 0.0;
  /// The episode is over; call reset() before stepping again.
  bool terminal = false;
  /// The episode ended on a step budget rather than a failure state, so the
  /// next state still has value for bootstrapping.
  bool truncated = false;
};

/// Discrete-action episodic environment.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Shape state_shape() const = 0;
  virtual int n_actions() const = 0;
  virtual Tensor reset() = 0;
  /// Throws std::logic_error if the episode already ended.
  virtual StepResult step(int action) = 0;
  virtual void seed(std::uint64_t seed) = 0;
};

}  // namespace daqn
