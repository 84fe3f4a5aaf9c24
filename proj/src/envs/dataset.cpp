#include "daqn/envs/dataset.hpp"

#include <array>
#include <fstream>
#include <random>

#include "daqn/envs/glyph_duel.hpp"

namespace daqn {
namespace {

constexpr std::array<std::string_view, 4> kSourceNames = {"domain_images", "background_only", "unrelated_images",
                                                          "random_policy_states"};

Tensor image_item(DataSource source, const GlyphDuelConfig& cfg, std::uint64_t item_seed, int index) {
  switch (source) {
    case DataSource::domain_images:
      return glyph_render(static_cast<Glyph>(index % kGlyphClasses), item_seed, cfg);
    case DataSource::background_only:
      return glyph_render(Glyph::background, item_seed, cfg);
    case DataSource::unrelated_images:
      return render_unrelated(item_seed, cfg);
    default:
      throw std::invalid_argument("not an image source");
  }
}

}  // namespace

std::string_view to_string(DataSource s) { return kSourceNames.at(static_cast<std::size_t>(s)); }

std::optional<DataSource> parse_data_source(std::string_view name) {
  for (std::size_t i = 0; i < kSourceNames.size(); ++i)
    if (kSourceNames[i] == name) return static_cast<DataSource>(i);
  return std::nullopt;
}

PretrainDataset collect_pretraining_data(Environment& env, CapturePolicy policy, int n_items, DataSource source,
                                         std::uint64_t seed) {
  if (n_items < 1) throw std::invalid_argument("n_items must be >= 1");
  PretrainDataset ds;
  ds.source = source;
  std::vector<Tensor> items;
  items.reserve(static_cast<std::size_t>(n_items));
  Rng rng(seed);

  if (source == DataSource::random_policy_states) {
    env.seed(seed);
    Tensor s = env.reset();
    std::uniform_int_distribution<int> act(0, env.n_actions() - 1);
    while (static_cast<int>(items.size()) < n_items) {
      items.push_back(s);
      if (policy == CapturePolicy::none) {
        s = env.reset();
        continue;
      }
      StepResult r = env.step(act(rng));
      s = r.terminal ? env.reset() : std::move(r.state);
    }
  } else {
    const auto* duel = dynamic_cast<const GlyphDuel*>(&env);
    if (!duel) throw std::invalid_argument(std::string(to_string(source)) + " needs an image environment");
    for (int i = 0; i < n_items; ++i) items.push_back(image_item(source, duel->config(), rng(), i));
  }

  ds.items = stack(items);
  if (ds.items.rank() == 2) ds.normalization = Normalization::fit(ds.items);
  return ds;
}

void save_dataset(const PretrainDataset& ds, const std::filesystem::path& stem) {
  const Json entries = write_blob(with_suffix(stem, ".bin"), {{"items", ds.items}});
  const Json manifest{{"schema_version", 1},
                      {"format", "daqn-dataset"},
                      {"byte_order", "little"},
                      {"dtype", "float64"},
                      {"source", std::string(to_string(ds.source))},
                      {"normalization", to_json(ds.normalization)},
                      {"tensors", entries}};
  std::ofstream out(with_suffix(stem, ".json"), std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + with_suffix(stem, ".json").string() + " for writing");
  out << manifest.dump(2) << '\n';
}

PretrainDataset load_dataset(const std::filesystem::path& stem) {
  std::ifstream in(with_suffix(stem, ".json"));
  if (!in) throw std::runtime_error("cannot open " + with_suffix(stem, ".json").string());
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("dataset manifest is not valid JSON: ") + e.what());
  }
  PretrainDataset ds;
  const auto source = parse_data_source(manifest.value("source", ""));
  if (!source) throw ConfigError("dataset manifest has an unknown source tag");
  ds.source = *source;
  ds.normalization = normalization_from_json(manifest.value("normalization", Json::object()));
  auto tensors = read_blob(with_suffix(stem, ".bin"), manifest.at("tensors"));
  if (tensors.size() != 1 || tensors[0].name != "items") throw ConfigError("dataset blob must hold one 'items' tensor");
  ds.items = std::move(tensors[0].tensor);
  return ds;
}

}  // namespace daqn
