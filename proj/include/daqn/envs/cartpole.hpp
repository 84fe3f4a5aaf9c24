#pragma once

#include "daqn/envs/environment.hpp"
#include "daqn/nnkit/layers.hpp"

namespace daqn {

struct CartPoleState {
  double x = 0.0;          // cart position (m)
  double x_dot = 0.0;      // cart velocity (m/s)
  double theta = 0.0;      // pole angle from vertical (rad)
  double theta_dot = 0.0;  // pole angular velocity (rad/s)

  bool operator==(const CartPoleState&) const = default;
};

struct CartPoleParams {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double half_length = 0.5;
  double force = 10.0;
  double tau = 0.02;
  double theta_limit_deg = 15.0;
  double x_limit = 2.4;
  int max_steps = 300;
};

/// One explicit-Euler step of the frictionless cart-pole under a horizontal
/// force on the cart:
///   temp      = (F + m l thdot^2 sin th) / (M + m)
///   th_acc    = (g sin th - cos th temp) / (l (4/3 - m cos^2 th / (M + m)))
///   x_acc     = temp - m l th_acc cos th / (M + m)
/// Positions advance with the old velocities.
CartPoleState cartpole_dynamics(const CartPoleState& s, double force, const CartPoleParams& p = {});

/// Pole balancing: action 0 pushes left, 1 pushes right; +1 reward per step.
/// The episode fails when |theta| exceeds the angle limit or |x| the track
/// limit, and is truncated after max_steps.
class CartPole final : public Environment {
 public:
  explicit CartPole(std::uint64_t seed = 0, CartPoleParams params = {});

  Shape state_shape() const override { return {4}; }
  int n_actions() const override { return 2; }
  Tensor reset() override;
  StepResult step(int action) override;
  void seed(std::uint64_t seed) override { rng_.seed(seed); }

  /// Starts an episode from an explicit state.
  void set_state(const CartPoleState& s);
  const CartPoleState& state() const { return state_; }
  int steps() const { return steps_; }
  const CartPoleParams& params() const { return params_; }

  static Tensor observe(const CartPoleState& s);

 private:
  CartPoleParams params_;
  CartPoleState state_;
  Rng rng_;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace daqn
