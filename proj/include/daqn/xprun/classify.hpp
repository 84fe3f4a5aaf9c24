#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "daqn/envs/glyph.hpp"
#include "daqn/nnkit/network.hpp"
#include "daqn/nnkit/optimizer.hpp"

namespace daqn {

/// Channel widths for the classification networks. Table widths are not
/// fixed by the architectures themselves, only the layer sequence is.
struct TableWidths {
  int c1 = 8;
  int c2 = 16;
  int c3 = 32;
  int hidden = 64;       // first fc of network v
  double dropout = 0.25;
};

inline constexpr std::string_view kTableNetworkIds[] = {"i", "ii", "iii", "iv", "v"};

/// Classification network i..v over [1, S, S] glyph images (S = 32 for the
/// default widths): valid convolutions followed by ReLU, 2x2 max-pools, a
/// linear fc classifier over four classes and softmax. Throws ConfigError for
/// an unknown id.
NetworkSpec table_network(std::string_view id, int image_size = 32, const TableWidths& widths = {});

struct GlyphClassData {
  Tensor images;            // [N, 1, S, S]
  std::vector<int> labels;  // Glyph as int, balanced i % 4
};

GlyphClassData make_classification_data(const GlyphDuelConfig& cfg, int n, std::uint64_t seed);

struct ClassifyConfig {
  std::string net = "iii";
  int epochs = 80;
  int n_items = 5000;
  double test_fraction = 0.1;
  int batch_size = 32;
  OptimizerConfig optimizer{};
  TableWidths widths{};
  GlyphDuelConfig glyph{};
  std::uint64_t seed = 0;  // data, split, init and shuffling
};

struct ClassifyResult {
  NetworkSpec spec;
  int n_train = 0, n_test = 0;
  double initial_accuracy = 0.0;  // untrained network on the test split
  std::vector<double> train_loss;
  std::vector<double> test_accuracy;  // one per epoch
};

/// Fraction of argmax predictions equal to the labels (eval mode).
double classification_accuracy(Network& net, const Tensor& images, std::span<const int> labels);

/// Trains the chosen network with cross-entropy on a fixed-seed 90/10 split
/// of synthetic glyphs. `on_epoch(epoch, loss, accuracy)` is called after
/// each epoch.
ClassifyResult classify_experiment(const ClassifyConfig& cfg,
                                   const std::function<void(int, double, double)>& on_epoch = {});

}  // namespace daqn
