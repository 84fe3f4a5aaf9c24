#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "daqn/autoenc/autoencoder.hpp"
#include "daqn/nnkit/serialize.hpp"

namespace daqn {

enum class TransferDepth { all_encoder_layers, first_layer_only };

std::string_view to_string(TransferDepth d);
std::optional<TransferDepth> parse_transfer_depth(std::string_view name);

struct TransferPlan {
  TransferDepth depth = TransferDepth::all_encoder_layers;
  int n_actions = 2;
  std::uint64_t head_init_seed = 0;

  bool operator==(const TransferPlan&) const = default;
};

Json to_json(const TransferPlan& plan);
TransferPlan transfer_plan_from_json(const Json& j);

/// Q network = `body` (+ flatten when the body ends in a feature map) + a
/// linear dense head to n_actions. Every layer starts from a fresh
/// `head_init_seed` initialization; then the encoder's parameters are copied
/// bit-exactly into the body prefix chosen by the plan. all_encoder_layers
/// requires the body to equal the encoder; first_layer_only requires the body
/// to agree with the encoder up to its first parameterized layer. The first
/// disagreeing layer is named in the ShapeError otherwise.
Network build_q_network(const AutoEncoder& ae, const TransferPlan& plan, std::span<const LayerSpec> body);

/// The same head construction with nothing copied (the plain DQN baseline).
Network build_fresh_q_network(const Shape& input_shape, std::span<const LayerSpec> body, int n_actions,
                              std::uint64_t seed);

struct TransferLayerReport {
  std::size_t index = 0;
  std::string description;
  bool copied = false;
  /// Largest |q - encoder| over the layer's parameters; empty when the layer
  /// has no encoder counterpart.
  std::optional<double> max_abs_diff;
};

struct TransferReport {
  std::vector<TransferLayerReport> layers;  // parameterized layers only
  std::size_t head_parameter_count = 0;
};

TransferReport verify_transfer(const Network& qnet, const AutoEncoder& ae, const TransferPlan& plan);

}  // namespace daqn
