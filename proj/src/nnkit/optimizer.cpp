#include "daqn/nnkit/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace daqn {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("optimizer learning_rate must be > 0");
  if (kind == OptimizerKind::adam) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
      throw std::invalid_argument("adam betas must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("adam epsilon must be > 0");
  }
}

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::sgd ? "sgd" : "adam"; }

Optimizer::Optimizer(OptimizerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void Optimizer::step(std::span<const ParamRef> params) {
  ++t_;
  const double lr = cfg_.learning_rate;
  if (cfg_.kind == OptimizerKind::sgd) {
    for (const auto& p : params) p.value->data() -= lr * p.grad->data();
    return;
  }
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.push_back(Eigen::VectorXd::Zero(p.value->size()));
      v_.push_back(Eigen::VectorXd::Zero(p.value->size()));
    }
  }
  if (m_.size() != params.size()) throw std::logic_error("optimizer stepped with a different parameter list");
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Eigen::VectorXd& g = params[i].grad->data();
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g.cwiseAbs2();
    params[i].value->data().array() -=
        lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + cfg_.epsilon);
  }
}

}  // namespace daqn
