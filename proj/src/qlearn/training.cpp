#include "daqn/qlearn/training.hpp"

#include <stdexcept>

namespace daqn {
namespace {

Tensor prepare(const Normalization& norm, const Tensor& obs) { return norm.is_identity() ? obs : norm.apply(obs); }

}  // namespace

TrainingLog run_training(Agent& agent, Environment& env, const TrainingOptions& opts, const EvalHook& eval) {
  if (opts.total_steps < 0) throw std::invalid_argument("total_steps must be >= 0");
  for (std::size_t i = 0; i < opts.milestones.size(); ++i) {
    if (opts.milestones[i] > opts.total_steps) throw std::invalid_argument("milestone beyond total_steps");
    if (i > 0 && opts.milestones[i] <= opts.milestones[i - 1])
      throw std::invalid_argument("milestones must be strictly increasing");
  }
  if (env.state_shape() != agent.online().input_shape())
    throw ShapeError("environment state " + to_string(env.state_shape()) + " does not match network input " +
                     to_string(agent.online().input_shape()));
  if (env.n_actions() != agent.n_actions())
    throw ShapeError("environment has " + std::to_string(env.n_actions()) + " actions, network outputs " +
                     std::to_string(agent.n_actions()));

  const DqnConfig& cfg = agent.config();
  DqnConfig schedule = cfg;
  if (auto* eg = std::get_if<EpsGreedy>(&schedule.exploration); eg && eg->decay_steps == 0)
    eg->decay_steps = std::max<long>(1, opts.total_steps / 10);
  const auto warmup = static_cast<std::size_t>(cfg.effective_warmup());

  TrainingLog log;
  std::size_t next_milestone = 0;
  auto maybe_eval = [&](long step) {
    while (next_milestone < opts.milestones.size() && opts.milestones[next_milestone] == step) {
      log.evals.push_back({step, eval ? eval(agent, step) : 0.0});
      ++next_milestone;
    }
  };
  maybe_eval(0);
  if (opts.total_steps == 0) return log;

  Tensor state = prepare(opts.normalization, env.reset());
  double episode_return = 0.0;
  long last_sync = agent.gradient_steps();
  for (long t = 1; t <= opts.total_steps; ++t) {
    const Eigen::VectorXd q = agent.q_values(state);
    const int action = explore_action(schedule.exploration, q, t - 1, agent.rng());
    StepResult r = env.step(action);
    episode_return += r.reward;
    Tensor next = prepare(opts.normalization, r.state);
    const bool ended = r.terminal;
    agent.memory().push({state, action, r.reward, next, r.terminal && !r.truncated});
    if (ended) {
      log.episode_returns.push_back(episode_return);
      episode_return = 0.0;
      state = prepare(opts.normalization, env.reset());
    } else {
      state = std::move(next);
    }

    if (agent.memory().size() >= warmup && t % cfg.train_interval == 0) {
      const auto batch = agent.memory().sample(static_cast<std::size_t>(cfg.batch_size), agent.rng());
      agent.td_train_step(batch);
      if (agent.gradient_steps() - last_sync >= cfg.target_sync_interval) {
        agent.sync_target();
        last_sync = agent.gradient_steps();
      }
    }
    log.env_steps = t;
    maybe_eval(t);
  }
  log.gradient_steps = agent.gradient_steps();
  return log;
}

double evaluate_returns(Agent& agent, Environment& env, int episodes, const Normalization& norm) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    Tensor s = prepare(norm, env.reset());
    for (;;) {
      StepResult r = env.step(agent.select_action(s, false));
      total += r.reward;
      if (r.terminal) break;
      s = prepare(norm, r.state);
    }
  }
  return total / episodes;
}

double evaluate_win_ratio(Agent& agent, const GlyphTestSet& test, const Normalization& norm) {
  if (test.labels.empty()) throw std::invalid_argument("empty test set");
  Network& net = agent.online();
  net.set_mode(Mode::eval);
  Tensor images = prepare(norm, test.images);
  const Eigen::MatrixXd cols = images.columns();
  int wins = 0;
  const Index chunk = 256;
  for (Index start = 0; start < cols.cols(); start += chunk) {
    const Index n = std::min(chunk, cols.cols() - start);
    const Eigen::MatrixXd q = net.forward_columns(cols.middleCols(start, n));
    for (Index i = 0; i < n; ++i) {
      const Glyph shown = test.labels[static_cast<std::size_t>(start + i)];
      wins += greedy_action(q.col(i)) == static_cast<int>(winning_move(shown));
    }
  }
  return static_cast<double>(wins) / static_cast<double>(test.labels.size());
}

}  // namespace daqn
