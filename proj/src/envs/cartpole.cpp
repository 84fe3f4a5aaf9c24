#include "daqn/envs/cartpole.hpp"

#include <cmath>
#include <numbers>

namespace daqn {

CartPoleState cartpole_dynamics(const CartPoleState& s, double force, const CartPoleParams& p) {
  const double total = p.cart_mass + p.pole_mass;
  const double cos_t = std::cos(s.theta), sin_t = std::sin(s.theta);
  const double temp = (force + p.pole_mass * p.half_length * s.theta_dot * s.theta_dot * sin_t) / total;
  const double theta_acc = (p.gravity * sin_t - cos_t * temp) /
                           (p.half_length * (4.0 / 3.0 - p.pole_mass * cos_t * cos_t / total));
  const double x_acc = temp - p.pole_mass * p.half_length * theta_acc * cos_t / total;
  return {s.x + p.tau * s.x_dot, s.x_dot + p.tau * x_acc, s.theta + p.tau * s.theta_dot,
          s.theta_dot + p.tau * theta_acc};
}

CartPole::CartPole(std::uint64_t seed, CartPoleParams params) : params_(params), rng_(seed) {}

Tensor CartPole::observe(const CartPoleState& s) { return Tensor({4}, {s.x, s.x_dot, s.theta, s.theta_dot}); }

Tensor CartPole::reset() {
  std::uniform_real_distribution<double> d(-0.05, 0.05);
  state_.x = d(rng_);
  state_.x_dot = d(rng_);
  state_.theta = d(rng_);
  state_.theta_dot = d(rng_);
  steps_ = 0;
  done_ = false;
  return observe(state_);
}

void CartPole::set_state(const CartPoleState& s) {
  state_ = s;
  steps_ = 0;
  done_ = false;
}

StepResult CartPole::step(int action) {
  if (done_) throw std::logic_error("cart-pole step after the episode ended; call reset()");
  if (action != 0 && action != 1) throw std::out_of_range("cart-pole action must be 0 (left) or 1 (right)");
  state_ = cartpole_dynamics(state_, action == 1 ? params_.force : -params_.force, params_);
  ++steps_;
  const double limit = params_.theta_limit_deg * std::numbers::pi / 180.0;
  const bool failed = std::abs(state_.theta) > limit || std::abs(state_.x) > params_.x_limit;
  const bool out_of_time = steps_ >= params_.max_steps;
  done_ = failed || out_of_time;
  return {observe(state_), 1.0, done_, out_of_time && !failed};
}

}  // namespace daqn
