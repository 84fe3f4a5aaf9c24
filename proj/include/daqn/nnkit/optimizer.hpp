#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "daqn/nnkit/network.hpp"

namespace daqn {

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Throws std::invalid_argument unless learning_rate > 0 and the Adam
  /// constants are in range.
  void validate() const;

  bool operator==(const OptimizerConfig&) const = default;
};

std::string_view to_string(OptimizerKind kind);

/// Plain SGD (p -= lr * g) or bias-corrected Adam. Moment buffers are keyed
/// by the position of each parameter in the list passed to `step`, so the
/// same network must be stepped every time.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg);

  void step(std::span<const ParamRef> params);
  void step(Network& net) { step(net.parameters()); }

  const OptimizerConfig& config() const { return cfg_; }
  long steps_taken() const { return t_; }

 private:
  OptimizerConfig cfg_;
  long t_ = 0;
  std::vector<Eigen::VectorXd> m_, v_;
};

}  // namespace daqn
