#pragma once

#include <cstddef>

#include "daqn/nnkit/loss.hpp"
#include "daqn/nnkit/network.hpp"

namespace daqn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  /// Elements whose +-eps perturbation crosses a ReLU or max-pool kink.
  std::size_t skipped = 0;
};

/// Compares backprop against central differences for every parameter and
/// every input element. Relative error is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
/// Runs in eval mode and leaves parameters and mode as it found them.
GradCheckResult grad_check(Network& net, const Tensor& input, LossKind loss, const Tensor& target,
                           double eps = 1e-5);

}  // namespace daqn
