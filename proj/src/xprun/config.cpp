#include "daqn/xprun/config.hpp"

#include <charconv>
#include <cstdio>

namespace daqn {
namespace {

template <class T>
T get(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

std::vector<long> every(long step, long last) {
  std::vector<long> out;
  for (long m = step; m <= last; m += step) out.push_back(m);
  return out;
}

std::vector<LayerSpec> layers_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("'body' must be an array of layers");
  std::vector<LayerSpec> out;
  for (const auto& l : j) out.push_back(layer_spec_from_json(l));
  return out;
}

Json layers_to_json(const std::vector<LayerSpec>& layers) {
  Json a = Json::array();
  for (const auto& l : layers) a.push_back(to_json(l));
  return a;
}

}  // namespace

std::string_view to_string(EnvKind e) { return e == EnvKind::cartpole ? "cartpole" : "glyphduel"; }

std::string_view to_string(Method m) {
  switch (m) {
    case Method::dqn: return "dqn";
    case Method::daqn: return "daqn";
    case Method::daqn_first_layer: return "daqn_first_layer";
  }
  return "?";
}

std::optional<EnvKind> parse_env_kind(std::string_view s) {
  if (s == "cartpole") return EnvKind::cartpole;
  if (s == "glyphduel") return EnvKind::glyphduel;
  return std::nullopt;
}

std::optional<Method> parse_method(std::string_view s) {
  if (s == "dqn") return Method::dqn;
  if (s == "daqn") return Method::daqn;
  if (s == "daqn_first_layer") return Method::daqn_first_layer;
  return std::nullopt;
}

std::vector<LayerSpec> glyph_body(int c1, int c2) {
  return {LayerSpec::conv2d(1, c1, 5), LayerSpec::relu(),          LayerSpec::maxpool2d(2),
          LayerSpec::conv2d(c1, c2, 3), LayerSpec::relu(),         LayerSpec::conv2d(c2, c2, 3),
          LayerSpec::relu(),            LayerSpec::maxpool2d(2)};
}

std::vector<LayerSpec> cartpole_body() {
  return {LayerSpec::dense(4, 16), LayerSpec::relu(), LayerSpec::dense(16, 16),
          LayerSpec::relu(),       LayerSpec::dense(16, 3), LayerSpec::relu()};
}

ExperimentConfig default_config(EnvKind env, Method method) {
  ExperimentConfig cfg;
  cfg.env = env;
  cfg.method = method;
  PretrainConfig pre;
  if (env == EnvKind::cartpole) {
    cfg.dqn.config.exploration = Boltzmann{1.0};
    cfg.dqn.config.target_sync_interval = 100;
    cfg.dqn.config.replay_capacity = 10000;
    cfg.dqn.body = cartpole_body();
    cfg.dqn.total_steps = 3000;
    cfg.dqn.eval.milestones = every(500, 3000);
    pre.source = DataSource::random_policy_states;
    pre.n_items = 10000;
    pre.ae.epochs = 25;
    for (std::uint64_t s = 0; s < 10; ++s) cfg.seeds.push_back(s);
  } else {
    cfg.dqn.config.exploration = EpsGreedy{1.0, 0.1, 0};
    cfg.dqn.config.optimizer = {OptimizerKind::sgd, 0.001};
    cfg.dqn.config.target_sync_interval = 500;
    cfg.dqn.config.replay_capacity = 1000;
    cfg.dqn.body = glyph_body();
    cfg.dqn.total_steps = 100000;
    cfg.dqn.eval.milestones = every(5000, 100000);
    pre.source = DataSource::domain_images;
    pre.n_items = 1000;
    pre.ae.epochs = 30;
    pre.ae.augmentation = {0.1, 15.0, true};
    for (std::uint64_t s = 0; s < 5; ++s) cfg.seeds.push_back(s);
  }
  if (method != Method::dqn) cfg.pretrain = pre;
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.schema_version != kConfigSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version));
  if (cfg.seeds.empty()) throw ConfigError("'seeds' must not be empty");
  if (cfg.method == Method::dqn && cfg.pretrain) throw ConfigError("method dqn takes no 'pretrain' section");
  if (cfg.method != Method::dqn && !cfg.pretrain)
    throw ConfigError("method " + std::string(to_string(cfg.method)) + " needs a 'pretrain' section");
  if (cfg.dqn.total_steps < 0) throw ConfigError("dqn.total_steps must be >= 0");
  if (cfg.dqn.body.empty()) throw ConfigError("dqn.body must not be empty");
  const auto& ms = cfg.dqn.eval.milestones;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i] < 0 || ms[i] > cfg.dqn.total_steps)
      throw ConfigError("milestone " + std::to_string(ms[i]) + " outside [0, total_steps]");
    if (i > 0 && ms[i] <= ms[i - 1]) throw ConfigError("eval milestones must be strictly increasing");
  }
  if (cfg.dqn.eval.episodes < 1 || cfg.dqn.eval.test_images < 1)
    throw ConfigError("eval episodes and test_images must be >= 1");
  if (cfg.normalization_items < 1) throw ConfigError("normalization_items must be >= 1");
  const Shape input = cfg.env == EnvKind::cartpole ? Shape{4} : Shape{1, cfg.glyph.image_size, cfg.glyph.image_size};
  try {
    shape_chain(NetworkSpec{input, cfg.dqn.body});
  } catch (const ShapeError& e) {
    throw ConfigError(std::string("dqn.body: ") + e.what());
  }
  if (cfg.pretrain) {
    if (cfg.pretrain->n_items < 1) throw ConfigError("pretrain.n_items must be >= 1");
    const bool image_source = cfg.pretrain->source != DataSource::random_policy_states;
    if (cfg.env == EnvKind::cartpole && image_source)
      throw ConfigError("cart-pole pre-training data must be random_policy_states");
    try {
      cfg.pretrain->ae.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("pretrain.ae: ") + e.what());
    }
  }
  try {
    cfg.dqn.config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("dqn.config: ") + e.what());
  }
}

Json to_json(const DqnSection& s) {
  return Json{{"config", to_json(s.config)},
              {"body", layers_to_json(s.body)},
              {"total_steps", s.total_steps},
              {"eval",
               {{"milestones", s.eval.milestones}, {"episodes", s.eval.episodes}, {"test_images", s.eval.test_images}}}};
}

Json to_json(const ExperimentConfig& cfg) {
  Json j{{"schema_version", cfg.schema_version},
         {"env", std::string(to_string(cfg.env))},
         {"method", std::string(to_string(cfg.method))},
         {"dqn", to_json(cfg.dqn)},
         {"normalization_items", cfg.normalization_items},
         {"seeds", cfg.seeds}};
  if (cfg.env == EnvKind::glyphduel) j["glyph"] = to_json(cfg.glyph);
  if (cfg.pretrain)
    j["pretrain"] = {{"source", std::string(to_string(cfg.pretrain->source))},
                     {"n_items", cfg.pretrain->n_items},
                     {"ae", to_json(cfg.pretrain->ae)}};
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  if (!j.contains("schema_version")) throw ConfigError("missing required field 'schema_version'");
  const int version = get(j, "schema_version", 0);
  if (version != kConfigSchemaVersion) throw ConfigError("unsupported schema_version " + std::to_string(version));
  const auto env = parse_env_kind(get<std::string>(j, "env", ""));
  if (!env) throw ConfigError("'env' must be cartpole or glyphduel");
  const auto method = parse_method(get<std::string>(j, "method", ""));
  if (!method) throw ConfigError("'method' must be dqn, daqn or daqn_first_layer");

  ExperimentConfig cfg = default_config(*env, *method);
  if (j.contains("glyph")) cfg.glyph = glyph_config_from_json(j.at("glyph"));
  cfg.normalization_items = get(j, "normalization_items", cfg.normalization_items);
  if (j.contains("seeds")) cfg.seeds = get<std::vector<std::uint64_t>>(j, "seeds", {});

  if (j.contains("pretrain")) {
    if (*method == Method::dqn) throw ConfigError("method dqn takes no 'pretrain' section");
    const Json& p = j.at("pretrain");
    if (!p.is_object()) throw ConfigError("'pretrain' must be an object");
    if (p.contains("source")) {
      const auto src = parse_data_source(get<std::string>(p, "source", ""));
      if (!src) throw ConfigError("pretrain.source: unknown source tag");
      cfg.pretrain->source = *src;
    }
    cfg.pretrain->n_items = get(p, "n_items", cfg.pretrain->n_items);
    if (p.contains("ae")) {
      Json merged = to_json(cfg.pretrain->ae);
      merged.merge_patch(p.at("ae"));
      cfg.pretrain->ae = ae_train_config_from_json(merged);
    }
  }

  if (j.contains("dqn")) {
    const Json& d = j.at("dqn");
    if (!d.is_object()) throw ConfigError("'dqn' must be an object");
    if (d.contains("config")) {
      Json merged = to_json(cfg.dqn.config);
      merged.merge_patch(d.at("config"));
      cfg.dqn.config = dqn_config_from_json(merged);
    }
    if (d.contains("body")) cfg.dqn.body = layers_from_json(d.at("body"));
    cfg.dqn.total_steps = get(d, "total_steps", cfg.dqn.total_steps);
    if (d.contains("eval")) {
      const Json& e = d.at("eval");
      if (e.contains("milestones")) {
        cfg.dqn.eval.milestones = get<std::vector<long>>(e, "milestones", {});
      } else if (e.contains("every")) {
        cfg.dqn.eval.milestones = every(get(e, "every", 1L), cfg.dqn.total_steps);
      }
      cfg.dqn.eval.episodes = get(e, "episodes", cfg.dqn.eval.episodes);
      cfg.dqn.eval.test_images = get(e, "test_images", cfg.dqn.eval.test_images);
    } else if (d.contains("total_steps") && !cfg.dqn.eval.milestones.empty() &&
               cfg.dqn.eval.milestones.back() > cfg.dqn.total_steps) {
      throw ConfigError("dqn.total_steps is below the default milestones; give dqn.eval.milestones or every");
    }
  }
  validate(cfg);
  return cfg;
}

std::string dqn_section_hash(const ExperimentConfig& cfg) {
  const std::string text = to_json(cfg.dqn).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  auto number = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw ConfigError("bad seed '" + std::string(s) + "'");
    return v;
  };
  std::vector<std::uint64_t> out;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const auto lo = number(text.substr(0, dots)), hi = number(text.substr(dots + 2));
    if (hi < lo) throw ConfigError("empty seed range '" + std::string(text) + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto part = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(number(part));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t purpose) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return splitmix(splitmix(run_seed) ^ (purpose * 0xd1b54a32d192ed03ULL));
}

}  // namespace daqn
