#include "daqn/nnkit/network.hpp"

#include <stdexcept>

namespace daqn {

Network::Network(NetworkSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  shapes_ = shape_chain(spec_);
  layers_.reserve(spec_.layers.size());
  for (std::size_t i = 0; i < spec_.layers.size(); ++i)
    layers_.push_back(make_layer(spec_.layers[i], shapes_[i], static_cast<int>(i)));

  Rng init_rng(seed);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const bool relu_next = i + 1 < layers_.size() && spec_.layers[i + 1].kind == LayerKind::relu;
    layers_[i]->init_params(init_rng, relu_next);
  }
  rng_.seed(seed ^ 0x9e3779b97f4a7c15ULL);
}

Network::Network(const Network& other)
    : spec_(other.spec_),
      shapes_(other.shapes_),
      mode_(other.mode_),
      rng_(other.rng_),
      have_forward_(other.have_forward_),
      last_was_batch_(other.last_was_batch_),
      last_batch_(other.last_batch_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Tensor Network::forward(const Tensor& input) {
  const Shape& in = input_shape();
  if (input.shape() == in) {
    Eigen::MatrixXd x = input.data();
    Eigen::MatrixXd y = forward_columns(x);
    last_was_batch_ = false;
    return Tensor(output_shape(), Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(y.data(), y.size())));
  }
  if (input.rank() == static_cast<int>(in.size()) + 1 && Shape(input.shape().begin() + 1, input.shape().end()) == in) {
    Eigen::MatrixXd y = forward_columns(input.columns());
    last_was_batch_ = true;
    return from_columns(y, output_shape());
  }
  throw ShapeError("network input: expected " + to_string(in) + " or [N, ...] batch of it, got " +
                   to_string(input.shape()) +
                   (layers_.empty() ? std::string() : " at layer 0 (" + describe(spec_.layers.front()) + ")"));
}

Eigen::MatrixXd Network::forward_columns(const Eigen::MatrixXd& x, std::size_t stop) {
  const Index rows = shape_size(input_shape());
  if (x.rows() != rows)
    throw ShapeError("network input: expected " + std::to_string(rows) + " features per sample, got " +
                     std::to_string(x.rows()));
  const bool train = mode_ == Mode::train;
  const std::size_t n = std::min(stop, layers_.size());
  Eigen::MatrixXd cur = x, next;
  for (std::size_t i = 0; i < n; ++i) {
    layers_[i]->forward(cur, next, train, rng_);
    cur.swap(next);
  }
  have_forward_ = n == layers_.size();
  last_batch_ = static_cast<int>(x.cols());
  return cur;
}

void Network::backward_columns(const Eigen::MatrixXd& grad, Eigen::MatrixXd* grad_in) {
  if (!have_forward_) throw std::logic_error("backward called without a preceding forward");
  if (grad.rows() != shape_size(output_shape()) || grad.cols() != last_batch_)
    throw ShapeError("loss gradient has shape (" + std::to_string(grad.rows()) + " x " + std::to_string(grad.cols()) +
                     "), expected (" + std::to_string(shape_size(output_shape())) + " x " +
                     std::to_string(last_batch_) + ")");
  if (layers_.empty()) {
    if (grad_in) *grad_in = grad;
    return;
  }
  Eigen::MatrixXd cur = grad, next;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const bool need_in = i > 0 || grad_in != nullptr;
    layers_[i]->backward(cur, need_in ? &next : nullptr);
    if (need_in) cur.swap(next);
  }
  if (grad_in) *grad_in = std::move(cur);
}

Tensor Network::backward(const Tensor& loss_grad) {
  if (!have_forward_) throw std::logic_error("backward called without a preceding forward");
  Eigen::MatrixXd g;
  if (last_was_batch_) {
    if (loss_grad.shape() != batched(output_shape(), last_batch_))
      throw ShapeError("loss gradient shape " + to_string(loss_grad.shape()) + " does not match output " +
                       to_string(batched(output_shape(), last_batch_)));
    g = loss_grad.columns();
  } else {
    if (loss_grad.shape() != output_shape())
      throw ShapeError("loss gradient shape " + to_string(loss_grad.shape()) + " does not match output " +
                       to_string(output_shape()));
    g = loss_grad.data();
  }
  Eigen::MatrixXd gin;
  backward_columns(g, &gin);
  if (last_was_batch_) return from_columns(gin, input_shape());
  return Tensor(input_shape(), Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(gin.data(), gin.size())));
}

std::vector<ParamRef> Network::parameters() {
  std::vector<ParamRef> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto values = layers_[i]->params();
    auto grads = layers_[i]->grads();
    for (std::size_t j = 0; j < values.size(); ++j) {
      std::string name = std::to_string(i) + "." + std::string(to_string(spec_.layers[i].kind)) +
                         (j == 0 ? ".weight" : ".bias");
      out.push_back({std::move(name), values[j], grads[j]});
    }
  }
  return out;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i)
    for (const Tensor* t : layer_params(i)) n += static_cast<std::size_t>(t->size());
  return n;
}

std::vector<const Tensor*> Network::layer_params(std::size_t i) const {
  auto ps = layers_.at(i)->params();
  return {ps.begin(), ps.end()};
}

void Network::set_layer_params(std::size_t i, const std::vector<Tensor>& values) {
  auto ps = layers_.at(i)->params();
  if (ps.size() != values.size())
    throw ShapeError("layer " + std::to_string(i) + ": expected " + std::to_string(ps.size()) + " parameter tensors");
  for (std::size_t j = 0; j < ps.size(); ++j) {
    if (ps[j]->shape() != values[j].shape())
      throw ShapeError("layer " + std::to_string(i) + " (" + describe(spec_.layers[i]) + "): parameter shape " +
                       to_string(values[j].shape()) + " does not match " + to_string(ps[j]->shape()));
    *ps[j] = values[j];
  }
}

std::vector<std::int64_t> Network::activation_signature() const {
  std::vector<std::int64_t> sig;
  for (const auto& l : layers_) l->append_signature(sig);
  return sig;
}

const Tensor& find_param(Network& net, const std::string& name) {
  for (const auto& p : net.parameters())
    if (p.name == name) return *p.value;
  throw std::out_of_range("no parameter named " + name);
}

}  // namespace daqn
