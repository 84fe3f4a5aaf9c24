#pragma once

#include <cstdint>
#include <vector>

#include "daqn/autoenc/augment.hpp"
#include "daqn/autoenc/autoencoder.hpp"
#include "daqn/nnkit/optimizer.hpp"

namespace daqn {

struct AeTrainConfig {
  int epochs = 25;
  int batch_size = 32;
  OptimizerConfig optimizer{};
  AugmentSpec augmentation{};
  std::uint64_t shuffle_seed = 0;

  void validate() const;
  bool operator==(const AeTrainConfig&) const = default;
};

Json to_json(const AeTrainConfig& cfg);
AeTrainConfig ae_train_config_from_json(const Json& j);

/// Minimizes the mean squared reconstruction error over `dataset` ([N, ...]
/// matching the encoder input). Returns one value per epoch: the mean MSE
/// over the whole (unaugmented) training set measured after that epoch.
std::vector<double> train_ae(AutoEncoder& ae, const Tensor& dataset, const AeTrainConfig& cfg);

/// Mean squared reconstruction error over an [N, ...] stack, eval mode.
double reconstruction_mse(AutoEncoder& ae, const Tensor& dataset);

}  // namespace daqn
