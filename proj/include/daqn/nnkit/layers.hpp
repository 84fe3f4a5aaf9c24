#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "daqn/nnkit/layer_spec.hpp"
#include "daqn/nnkit/tensor.hpp"

namespace daqn {

using Rng = std::mt19937_64;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One instantiated layer. Batches travel as column-per-sample matrices whose
/// rows are the row-major flattening of the per-sample shape.
class Layer {
 public:
  Layer(LayerSpec spec, Shape input_shape, Shape output_shape)
      : spec_(std::move(spec)), input_shape_(std::move(input_shape)), output_shape_(std::move(output_shape)) {}
  virtual ~Layer() = default;

  const LayerSpec& spec() const { return spec_; }
  const Shape& input_shape() const { return input_shape_; }
  const Shape& output_shape() const { return output_shape_; }

  /// Caches whatever backward needs.
  virtual void forward(const Eigen::MatrixXd& x, Eigen::MatrixXd& y, bool train, Rng& rng) = 0;

  /// Overwrites parameter gradients with the batch sum. `grad_in` may be null
  /// when the caller does not need the input gradient.
  virtual void backward(const Eigen::MatrixXd& grad_out, Eigen::MatrixXd* grad_in) = 0;

  /// Weight first, then bias (if any).
  virtual std::vector<Tensor*> params() { return {}; }
  virtual std::vector<Tensor*> grads() { return {}; }
  virtual void init_params(Rng& /*rng*/, bool /*followed_by_relu*/) {}

  /// Discrete state of piecewise-linear pieces (ReLU masks, pooling argmax)
  /// from the last forward; a change marks a kink crossed.
  virtual void append_signature(std::vector<std::int64_t>& /*sig*/) const {}

  virtual std::unique_ptr<Layer> clone() const = 0;

 private:
  LayerSpec spec_;
  Shape input_shape_;
  Shape output_shape_;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Shape& input_shape, int index = -1);

}  // namespace daqn
