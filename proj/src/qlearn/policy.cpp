#include "daqn/qlearn/policy.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace daqn {

double EpsGreedy::epsilon_at(long step) const {
  if (decay_steps <= 0 || step >= decay_steps) return eps_end;
  const double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
  return eps_start + (eps_end - eps_start) * frac;
}

int greedy_action(const Eigen::Ref<const Eigen::VectorXd>& q) {
  if (q.size() == 0) throw std::invalid_argument("empty Q vector");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < q.size(); ++i)
    if (q[i] > q[best]) best = i;
  return static_cast<int>(best);
}

Eigen::VectorXd boltzmann_probabilities(const Eigen::Ref<const Eigen::VectorXd>& q, double temperature) {
  if (temperature <= 0.0) throw std::invalid_argument("Boltzmann temperature must be positive");
  Eigen::VectorXd z = q / temperature;
  z = (z.array() - z.maxCoeff()).exp();
  return z / z.sum();
}

int explore_action(const Exploration& policy, const Eigen::Ref<const Eigen::VectorXd>& q, long step, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (const auto* eg = std::get_if<EpsGreedy>(&policy)) {
    if (u(rng) < eg->epsilon_at(step))
      return std::uniform_int_distribution<int>(0, static_cast<int>(q.size()) - 1)(rng);
    return greedy_action(q);
  }
  const Eigen::VectorXd p = boltzmann_probabilities(q, std::get<Boltzmann>(policy).temperature);
  const double r = u(rng);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (r < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

}  // namespace daqn
