#include "daqn/nnkit/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace daqn {
namespace {

constexpr double kProbFloor = 1e-12;

int batch_of(const Tensor& t) { return t.rank() >= 2 ? t.shape()[0] : 1; }

}  // namespace

LossResult loss_and_grad(LossKind kind, const Tensor& prediction, const Tensor& target) {
  if (prediction.shape() != target.shape())
    throw ShapeError("loss: prediction shape " + to_string(prediction.shape()) + " differs from target shape " +
                     to_string(target.shape()));
  LossResult r;
  r.grad = Tensor(prediction.shape());
  if (kind == LossKind::mse) {
    const Eigen::VectorXd diff = prediction.data() - target.data();
    const double n = static_cast<double>(diff.size());
    r.value = diff.squaredNorm() / n;
    r.grad.data() = (2.0 / n) * diff;
    return r;
  }
  const double n = batch_of(prediction);
  double total = 0.0;
  for (Index i = 0; i < prediction.size(); ++i) {
    const double t = target[i];
    if (t == 0.0) continue;
    const double p = std::max(prediction[i], kProbFloor);
    total -= t * std::log(p);
    r.grad[i] = -t / (p * n);
  }
  r.value = total / n;
  return r;
}

Tensor one_hot(std::span<const int> classes, int n_classes) {
  Tensor t({static_cast<int>(classes.size()), n_classes});
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] < 0 || classes[i] >= n_classes) throw std::out_of_range("class index out of range");
    t[static_cast<Index>(i) * n_classes + classes[i]] = 1.0;
  }
  return t;
}

LossResult cross_entropy(const Tensor& prediction, std::span<const int> classes) {
  const int n = batch_of(prediction);
  if (static_cast<int>(classes.size()) != n)
    throw ShapeError("cross_entropy: " + std::to_string(classes.size()) + " labels for a batch of " +
                     std::to_string(n));
  const int n_classes = static_cast<int>(prediction.size() / n);
  Tensor target = one_hot(classes, n_classes).reshaped(prediction.shape());
  return loss_and_grad(LossKind::cross_entropy, prediction, target);
}

}  // namespace daqn
