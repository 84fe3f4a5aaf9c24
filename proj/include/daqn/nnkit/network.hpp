#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "daqn/nnkit/layer_spec.hpp"
#include "daqn/nnkit/layers.hpp"
#include "daqn/nnkit/tensor.hpp"

namespace daqn {

enum class Mode { train, eval };

/// Named view of one parameter tensor and its gradient inside a Network.
struct ParamRef {
  std::string name;
  Tensor* value = nullptr;
  Tensor* grad = nullptr;
};

/// A sequential chain of layers with its parameters (the model weights).
///
/// `forward` accepts either one sample (shape == input_shape()) or a batch
/// (shape == [N, input_shape()...]) and returns the matching form. Forward
/// caches activations; `backward` consumes them and leaves per-parameter
/// gradients (summed over the batch) readable through `parameters()`.
class Network {
 public:
  Network() = default;
  /// Validates the shape chain and initializes parameters from `seed`.
  Network(NetworkSpec spec, std::uint64_t seed);

  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const NetworkSpec& spec() const { return spec_; }
  const Shape& input_shape() const { return spec_.input_shape; }
  const Shape& output_shape() const { return shapes_.back(); }
  /// Output shape of layer i (per sample).
  const Shape& layer_output_shape(std::size_t i) const { return shapes_.at(i + 1); }

  std::size_t layer_count() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

  Mode mode() const { return mode_; }
  void set_mode(Mode mode) { mode_ = mode; }
  /// Reseeds the generator used by dropout masks.
  void seed_dropout(std::uint64_t seed) { rng_.seed(seed); }

  Tensor forward(const Tensor& input);
  /// Column-per-sample fast path; `stop` limits evaluation to the first
  /// `stop` layers (the prefix activations).
  Eigen::MatrixXd forward_columns(const Eigen::MatrixXd& x, std::size_t stop = SIZE_MAX);

  /// Returns dLoss/dInput in the same form `forward` received.
  Tensor backward(const Tensor& loss_grad);
  /// Column-per-sample fast path; skips the input gradient unless requested.
  void backward_columns(const Eigen::MatrixXd& grad, Eigen::MatrixXd* grad_in = nullptr);

  std::vector<ParamRef> parameters();
  std::size_t parameter_count() const;

  /// Parameters of layer i (weight then bias), empty for parameter-free layers.
  std::vector<const Tensor*> layer_params(std::size_t i) const;
  void set_layer_params(std::size_t i, const std::vector<Tensor>& values);

  std::vector<std::int64_t> activation_signature() const;

 private:
  NetworkSpec spec_;
  std::vector<Shape> shapes_;
  std::vector<std::unique_ptr<Layer>> layers_;
  Mode mode_ = Mode::eval;
  Rng rng_{0};
  bool have_forward_ = false;
  bool last_was_batch_ = false;
  int last_batch_ = 0;
};

/// Reads a single parameter tensor by its manifest name.
const Tensor& find_param(Network& net, const std::string& name);

}  // namespace daqn
