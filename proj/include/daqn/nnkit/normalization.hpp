#pragma once

#include <Eigen/Core>

#include "daqn/nnkit/tensor.hpp"

namespace daqn {

/// Per-feature standardization x -> (x - mean) / stddev. Empty vectors mean
/// identity (used for images, which are already in [0, 1]).
struct Normalization {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  bool is_identity() const { return mean.size() == 0; }

  /// Statistics over axis 0 of an [N, ...] stack. A feature with zero spread
  /// keeps stddev 1.
  static Normalization fit(const Tensor& stack);

  /// Accepts one sample or an [N, ...] batch.
  Tensor apply(const Tensor& x) const;
  void apply_columns(Eigen::Ref<Eigen::MatrixXd> cols) const;

  bool operator==(const Normalization& o) const { return mean == o.mean && stddev == o.stddev; }
};

}  // namespace daqn
