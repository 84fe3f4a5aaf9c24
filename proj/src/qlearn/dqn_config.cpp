#include "daqn/qlearn/dqn_config.hpp"

#include <stdexcept>

namespace daqn {
namespace {

template <class T>
T get(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("dqn field '") + key + "': " + e.what());
  }
}

}  // namespace

void DqnConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0, 1)");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (replay_capacity < 1) throw std::invalid_argument("replay_capacity must be >= 1");
  if (target_sync_interval < 1) throw std::invalid_argument("target_sync_interval must be >= 1");
  if (train_interval < 1) throw std::invalid_argument("train_interval must be >= 1");
  if (warmup_steps < -1) throw std::invalid_argument("warmup_steps must be >= 0 (or -1 for the default)");
  if (const auto* eg = std::get_if<EpsGreedy>(&exploration)) {
    if (eg->eps_start < 0 || eg->eps_start > 1 || eg->eps_end < 0 || eg->eps_end > 1)
      throw std::invalid_argument("epsilon values must be in [0, 1]");
    if (eg->decay_steps < 0) throw std::invalid_argument("decay_steps must be >= 0");
  } else if (!(std::get<Boltzmann>(exploration).temperature > 0.0)) {
    throw std::invalid_argument("Boltzmann temperature must be positive");
  }
  optimizer.validate();
}

Json to_json(const DqnConfig& cfg) {
  Json ex;
  if (const auto* eg = std::get_if<EpsGreedy>(&cfg.exploration))
    ex = {{"kind", "epsilon_greedy"},
          {"eps_start", eg->eps_start},
          {"eps_end", eg->eps_end},
          {"decay_steps", eg->decay_steps}};
  else
    ex = {{"kind", "boltzmann"}, {"temperature", std::get<Boltzmann>(cfg.exploration).temperature}};
  return Json{{"gamma", cfg.gamma},
              {"batch_size", cfg.batch_size},
              {"replay_capacity", cfg.replay_capacity},
              {"target_sync_interval", cfg.target_sync_interval},
              {"warmup_steps", cfg.warmup_steps},
              {"train_interval", cfg.train_interval},
              {"exploration", ex},
              {"optimizer", to_json(cfg.optimizer)}};
}

DqnConfig dqn_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("dqn config must be an object");
  DqnConfig cfg;
  cfg.gamma = get(j, "gamma", cfg.gamma);
  cfg.batch_size = get(j, "batch_size", cfg.batch_size);
  cfg.replay_capacity = get(j, "replay_capacity", cfg.replay_capacity);
  cfg.target_sync_interval = get(j, "target_sync_interval", cfg.target_sync_interval);
  cfg.warmup_steps = get(j, "warmup_steps", cfg.warmup_steps);
  cfg.train_interval = get(j, "train_interval", cfg.train_interval);
  if (j.contains("exploration")) {
    const Json& ex = j.at("exploration");
    const auto kind = get<std::string>(ex, "kind", "boltzmann");
    if (kind == "boltzmann") {
      cfg.exploration = Boltzmann{get(ex, "temperature", 1.0)};
    } else if (kind == "epsilon_greedy") {
      EpsGreedy eg;
      eg.eps_start = get(ex, "eps_start", eg.eps_start);
      eg.eps_end = get(ex, "eps_end", eg.eps_end);
      eg.decay_steps = get(ex, "decay_steps", eg.decay_steps);
      cfg.exploration = eg;
    } else {
      throw ConfigError("unknown exploration kind '" + kind + "'");
    }
  }
  if (j.contains("optimizer")) cfg.optimizer = optimizer_config_from_json(j.at("optimizer"));
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("dqn config: ") + e.what());
  }
  return cfg;
}

}  // namespace daqn
