#pragma once

#include <span>

#include "daqn/nnkit/tensor.hpp"

namespace daqn {

enum class LossKind { mse, cross_entropy };

struct LossResult {
  double value = 0.0;
  Tensor grad;  // dLoss/dPrediction, shaped like the prediction
};

/// MSE is the mean of squared differences over every element.
/// Cross-entropy expects softmax probabilities and one-hot targets of the
/// same shape; it averages over the batch (leading axis of a rank >= 2
/// prediction). Probabilities are floored at 1e-12 before the log.
LossResult loss_and_grad(LossKind kind, const Tensor& prediction, const Tensor& target);

/// Cross-entropy against class indices, one per sample.
LossResult cross_entropy(const Tensor& prediction, std::span<const int> classes);

/// One-hot encoding of class indices as an [N, n_classes] tensor.
Tensor one_hot(std::span<const int> classes, int n_classes);

}  // namespace daqn
