#include "daqn/qlearn/agent.hpp"

#include <stdexcept>

namespace daqn {

Agent::Agent(Network online, DqnConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      online_(std::move(online)),
      target_(online_),
      memory_(cfg_.replay_capacity),
      optimizer_(cfg_.optimizer),
      rng_(seed) {
  cfg_.validate();
  if (online_.output_shape().size() != 1)
    throw ShapeError("Q network must output a flat vector of action values, got " +
                     to_string(online_.output_shape()));
  online_.seed_dropout(seed ^ 0x5eedULL);
}

int Agent::n_actions() const { return online_.output_shape()[0]; }

Eigen::VectorXd Agent::q_values(const Tensor& state) {
  const Mode prev = online_.mode();
  online_.set_mode(Mode::eval);
  Eigen::MatrixXd q = online_.forward_columns(state.data());
  online_.set_mode(prev);
  return q.col(0);
}

int Agent::select_action(const Tensor& state, bool explore, long step) {
  const Eigen::VectorXd q = q_values(state);
  return explore ? explore_action(cfg_.exploration, q, step, rng_) : greedy_action(q);
}

Eigen::MatrixXd Agent::stack_states(std::span<const Transition* const> batch, bool next) const {
  const Index rows = shape_size(online_.input_shape());
  Eigen::MatrixXd x(rows, static_cast<Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Tensor& s = next ? batch[i]->next_state : batch[i]->state;
    if (s.size() != rows)
      throw ShapeError("transition state has " + std::to_string(s.size()) + " values, network expects " +
                       std::to_string(rows));
    x.col(static_cast<Index>(i)) = s.data();
  }
  return x;
}

Eigen::VectorXd Agent::compute_targets(std::span<const Transition* const> batch) {
  Eigen::VectorXd y(static_cast<Index>(batch.size()));
  std::vector<const Transition*> live;
  std::vector<Index> where;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    y[static_cast<Index>(i)] = batch[i]->reward;
    if (!batch[i]->terminal) {
      live.push_back(batch[i]);
      where.push_back(static_cast<Index>(i));
    }
  }
  if (live.empty()) return y;
  target_.set_mode(Mode::eval);
  const Eigen::MatrixXd q_next = target_.forward_columns(stack_states(live, true));
  for (std::size_t k = 0; k < live.size(); ++k)
    y[where[k]] += cfg_.gamma * q_next.col(static_cast<Index>(k)).maxCoeff();
  return y;
}

double Agent::td_train_step(std::span<const Transition* const> batch) {
  if (batch.empty()) throw std::invalid_argument("td_train_step needs a non-empty batch");
  const Eigen::VectorXd y = compute_targets(batch);
  online_.set_mode(Mode::train);
  const Eigen::MatrixXd q = online_.forward_columns(stack_states(batch, false));
  const double n = static_cast<double>(batch.size());
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (Index i = 0; i < q.cols(); ++i) {
    const int a = batch[static_cast<std::size_t>(i)]->action;
    if (a < 0 || a >= q.rows()) throw std::out_of_range("transition action out of range");
    const double err = y[i] - q(a, i);
    loss += err * err;
    grad(a, i) = -2.0 * err / n;
  }
  online_.backward_columns(grad);
  optimizer_.step(online_);
  online_.set_mode(Mode::eval);
  ++gradient_steps_;
  return loss / n;
}

void Agent::sync_target() { target_ = online_; }

}  // namespace daqn
