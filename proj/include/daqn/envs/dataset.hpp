#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "daqn/envs/environment.hpp"
#include "daqn/envs/glyph.hpp"
#include "daqn/nnkit/normalization.hpp"
#include "daqn/nnkit/serialize.hpp"

namespace daqn {

/// Where auto-encoder pre-training data comes from.
enum class DataSource {
  domain_images,        // every glyph class, background included
  background_only,      // background renders only
  unrelated_images,     // off-domain pen strokes
  random_policy_states  // observations from a uniformly random agent
};

std::string_view to_string(DataSource s);
std::optional<DataSource> parse_data_source(std::string_view name);

enum class CapturePolicy { random, none };

struct PretrainDataset {
  DataSource source = DataSource::random_policy_states;
  Tensor items;  // [N, state...]
  Normalization normalization;
};

/// Random policy: rolls episodes with uniform actions and records every
/// observation (reset states included). No policy: records states without
/// acting; for the glyph game the source tag picks which renders are captured.
/// Vector states get standardization statistics, images identity.
PretrainDataset collect_pretraining_data(Environment& env, CapturePolicy policy, int n_items, DataSource source,
                                         std::uint64_t seed);

/// `<stem>.bin` + `<stem>.json` with the source tag and normalization.
void save_dataset(const PretrainDataset& ds, const std::filesystem::path& stem);
PretrainDataset load_dataset(const std::filesystem::path& stem);

}  // namespace daqn
