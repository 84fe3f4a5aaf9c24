#pragma once

#include "daqn/nnkit/layers.hpp"
#include "daqn/nnkit/serialize.hpp"
#include "daqn/nnkit/tensor.hpp"

namespace daqn {

/// Random image perturbations applied per sample while training an
/// auto-encoder. All zero / false means no augmentation.
struct AugmentSpec {
  double max_shift = 0.0;         // fraction of the image side, uniform in [-max_shift, max_shift]
  double max_rotation_deg = 0.0;  // uniform in [-max_rotation_deg, max_rotation_deg]
  bool flip = false;              // horizontal mirror with probability 1/2

  bool enabled() const { return max_shift > 0.0 || max_rotation_deg > 0.0 || flip; }
  bool operator==(const AugmentSpec&) const = default;
};

Json to_json(const AugmentSpec& spec);
AugmentSpec augment_spec_from_json(const Json& j);

/// Resamples a [C, H, W] image (bilinear, edge-clamped) under one random
/// shift/rotation/flip draw shared by all channels.
Tensor augment_image(const Tensor& image, const AugmentSpec& spec, Rng& rng);

/// In-place augmentation of a column-per-sample batch of `sample_shape` images.
void augment_columns(Eigen::Ref<Eigen::MatrixXd> cols, const Shape& sample_shape, const AugmentSpec& spec, Rng& rng);

}  // namespace daqn
