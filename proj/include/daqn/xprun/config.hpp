#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "daqn/autoenc/train.hpp"
#include "daqn/envs/dataset.hpp"
#include "daqn/envs/glyph.hpp"
#include "daqn/qlearn/dqn_config.hpp"

namespace daqn {

inline constexpr int kConfigSchemaVersion = 1;

enum class EnvKind { cartpole, glyphduel };
enum class Method { dqn, daqn, daqn_first_layer };

std::string_view to_string(EnvKind e);
std::string_view to_string(Method m);
std::optional<EnvKind> parse_env_kind(std::string_view s);
std::optional<Method> parse_method(std::string_view s);

struct PretrainConfig {
  DataSource source = DataSource::random_policy_states;
  int n_items = 10000;
  AeTrainConfig ae{};
};

struct EvalSchedule {
  std::vector<long> milestones;
  int episodes = 100;      // greedy episodes per cart-pole evaluation
  int test_images = 600;   // held-out glyph images per evaluation
};

/// Everything the DQN stage sees. Methods compared against each other must
/// agree on this section byte for byte.
struct DqnSection {
  DqnConfig config{};
  std::vector<LayerSpec> body;
  long total_steps = 0;
  EvalSchedule eval{};
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  EnvKind env = EnvKind::cartpole;
  Method method = Method::dqn;
  GlyphDuelConfig glyph{};
  std::optional<PretrainConfig> pretrain;  // present exactly for the daqn methods
  DqnSection dqn{};
  /// Random-policy states used for input standardization on vector
  /// environments when no pre-training data exists (plain dqn).
  int normalization_items = 10000;
  std::vector<std::uint64_t> seeds;
};

/// Network iii's convolutional stack at 32x32 with the given channel widths:
/// conv5, max2, conv3, conv3, max2 (ReLU after each conv).
std::vector<LayerSpec> glyph_body(int c1 = 4, int c2 = 8);
/// Three dense+ReLU layers 4 -> 16 -> 16 -> 3.
std::vector<LayerSpec> cartpole_body();

/// Defaults for an environment/method pair, seeds 0..9 (cart-pole) or 0..4.
ExperimentConfig default_config(EnvKind env, Method method);

/// Parses and validates; absent fields take default_config values. Throws
/// ConfigError with a field-level message.
ExperimentConfig experiment_config_from_json(const Json& j);
Json to_json(const ExperimentConfig& cfg);
Json to_json(const DqnSection& s);

/// Throws ConfigError if the config is inconsistent.
void validate(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical dump of the dqn section, as 16 hex digits.
std::string dqn_section_hash(const ExperimentConfig& cfg);

/// "0..9" (inclusive range), "3" or "1,4,7".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

/// Independent stream for one purpose of one run seed.
std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t purpose);

}  // namespace daqn
