#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "daqn/nnkit/layer_spec.hpp"
#include "daqn/nnkit/network.hpp"
#include "daqn/nnkit/normalization.hpp"
#include "daqn/nnkit/optimizer.hpp"

namespace daqn {

using Json = nlohmann::json;

/// A JSON document does not follow the expected schema.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NetworkSpec schema:
//   { "input_shape": [C, H, W] | [D],
//     "layers": [ { "kind": "dense", "in_units": 4, "out_units": 2, "bias": true },
//                 { "kind": "conv2d", "in_channels": 1, "out_channels": 8,
//                   "kernel_size": 3, "stride": 1, "padding": 0 },
//                 { "kind": "maxpool2d", "window": 2, "stride": 2 },
//                 { "kind": "upsample2d", "factor": 2 },
//                 { "kind": "dropout", "rate": 0.25 },
//                 { "kind": "relu" | "flatten" | "softmax" } ] }
// Optional fields take the LayerSpec defaults.
Json to_json(const LayerSpec& spec);
Json to_json(const NetworkSpec& spec);
Json to_json(const OptimizerConfig& cfg);
Json to_json(const Normalization& norm);

LayerSpec layer_spec_from_json(const Json& j);
NetworkSpec network_spec_from_json(const Json& j);
OptimizerConfig optimizer_config_from_json(const Json& j);
Normalization normalization_from_json(const Json& j);

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

/// Writes tensors back to back as little-endian IEEE-754 float64 and returns
/// the manifest entries [{ "name", "offset" (bytes), "shape" }].
Json write_blob(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_blob(const std::filesystem::path& path, const Json& entries);

/// `<stem>.bin` holds the parameters; `<stem>.json` is the manifest:
///   { "schema_version": 1, "format": "daqn-params", "byte_order": "little",
///     "dtype": "float64", "network": <NetworkSpec>, "parameters": [...],
///     "metadata": <caller-supplied object> }
void save_network(const Network& net, const std::filesystem::path& stem, const Json& metadata = Json::object());
Network load_network(const std::filesystem::path& stem, Json* metadata = nullptr);

std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix);

}  // namespace daqn
