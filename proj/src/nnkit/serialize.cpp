#include "daqn/nnkit/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace daqn {
namespace {

template <class T>
T field(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing required field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

}  // namespace

Json to_json(const LayerSpec& s) {
  Json j{{"kind", std::string(to_string(s.kind))}};
  switch (s.kind) {
    case LayerKind::dense:
      j["in_units"] = s.in_units;
      j["out_units"] = s.out_units;
      j["bias"] = s.bias;
      break;
    case LayerKind::conv2d:
      j["in_channels"] = s.in_channels;
      j["out_channels"] = s.out_channels;
      j["kernel_size"] = s.kernel_size;
      j["stride"] = s.stride;
      j["padding"] = s.padding;
      break;
    case LayerKind::maxpool2d:
      j["window"] = s.window;
      j["stride"] = s.stride;
      break;
    case LayerKind::upsample2d:
      j["factor"] = s.factor;
      break;
    case LayerKind::dropout:
      j["rate"] = s.rate;
      break;
    default:
      break;
  }
  return j;
}

Json to_json(const NetworkSpec& spec) {
  Json layers = Json::array();
  for (const auto& l : spec.layers) layers.push_back(to_json(l));
  return Json{{"input_shape", spec.input_shape}, {"layers", layers}};
}

Json to_json(const OptimizerConfig& cfg) {
  Json j{{"kind", std::string(to_string(cfg.kind))}, {"learning_rate", cfg.learning_rate}};
  if (cfg.kind == OptimizerKind::adam) {
    j["beta1"] = cfg.beta1;
    j["beta2"] = cfg.beta2;
    j["epsilon"] = cfg.epsilon;
  }
  return j;
}

Json to_json(const Normalization& norm) {
  if (norm.is_identity()) return Json{{"kind", "identity"}};
  return Json{{"kind", "standardize"},
              {"mean", std::vector<double>(norm.mean.begin(), norm.mean.end())},
              {"stddev", std::vector<double>(norm.stddev.begin(), norm.stddev.end())}};
}

LayerSpec layer_spec_from_json(const Json& j) {
  const auto name = required<std::string>(j, "kind");
  const auto kind = parse_layer_kind(name);
  if (!kind) throw ConfigError("unknown layer kind '" + name + "'");
  switch (*kind) {
    case LayerKind::dense:
      return LayerSpec::dense(required<int>(j, "in_units"), required<int>(j, "out_units"), field(j, "bias", true));
    case LayerKind::conv2d:
      return LayerSpec::conv2d(required<int>(j, "in_channels"), required<int>(j, "out_channels"),
                               required<int>(j, "kernel_size"), field(j, "stride", 1), field(j, "padding", 0));
    case LayerKind::maxpool2d:
      return LayerSpec::maxpool2d(required<int>(j, "window"), field(j, "stride", 0));
    case LayerKind::upsample2d:
      return LayerSpec::upsample2d(required<int>(j, "factor"));
    case LayerKind::dropout:
      return LayerSpec::dropout(required<double>(j, "rate"));
    case LayerKind::relu:
      return LayerSpec::relu();
    case LayerKind::flatten:
      return LayerSpec::flatten();
    case LayerKind::softmax:
      return LayerSpec::softmax();
  }
  throw ConfigError("unknown layer kind '" + name + "'");
}

NetworkSpec network_spec_from_json(const Json& j) {
  NetworkSpec spec;
  spec.input_shape = required<Shape>(j, "input_shape");
  if (!j.contains("layers") || !j.at("layers").is_array()) throw ConfigError("network spec needs a 'layers' array");
  for (const auto& l : j.at("layers")) spec.layers.push_back(layer_spec_from_json(l));
  try {
    shape_chain(spec);
  } catch (const ShapeError& e) {
    throw ConfigError(std::string("inconsistent network spec: ") + e.what());
  }
  return spec;
}

OptimizerConfig optimizer_config_from_json(const Json& j) {
  OptimizerConfig cfg;
  const auto kind = field<std::string>(j, "kind", "adam");
  if (kind == "sgd")
    cfg.kind = OptimizerKind::sgd;
  else if (kind == "adam")
    cfg.kind = OptimizerKind::adam;
  else
    throw ConfigError("unknown optimizer kind '" + kind + "'");
  cfg.learning_rate = field(j, "learning_rate", cfg.learning_rate);
  cfg.beta1 = field(j, "beta1", cfg.beta1);
  cfg.beta2 = field(j, "beta2", cfg.beta2);
  cfg.epsilon = field(j, "epsilon", cfg.epsilon);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

Normalization normalization_from_json(const Json& j) {
  const auto kind = field<std::string>(j, "kind", "identity");
  if (kind == "identity") return {};
  if (kind != "standardize") throw ConfigError("unknown normalization kind '" + kind + "'");
  const auto mean = required<std::vector<double>>(j, "mean");
  const auto stddev = required<std::vector<double>>(j, "stddev");
  if (mean.size() != stddev.size()) throw ConfigError("normalization mean/stddev length mismatch");
  Normalization n;
  n.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Index>(mean.size()));
  n.stddev = Eigen::Map<const Eigen::VectorXd>(stddev.data(), static_cast<Index>(stddev.size()));
  return n;
}

Json write_blob(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  Json entries = Json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    entries.push_back(Json{{"name", name}, {"offset", offset}, {"shape", t.shape()}});
    for (Index i = 0; i < t.size(); ++i) {
      std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(t[i]));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    offset += static_cast<std::uint64_t>(t.size()) * sizeof(double);
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
  return entries;
}

std::vector<NamedTensor> read_blob(const std::filesystem::path& path, const Json& entries) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<NamedTensor> out;
  for (const auto& e : entries) {
    const auto name = required<std::string>(e, "name");
    const auto offset = required<std::uint64_t>(e, "offset");
    const auto shape = required<Shape>(e, "shape");
    Tensor t(shape);
    const std::uint64_t len = static_cast<std::uint64_t>(t.size()) * sizeof(double);
    if (offset % sizeof(double) != 0 || offset + len > bytes.size())
      throw ConfigError("tensor '" + name + "' lies outside " + path.string());
    for (Index i = 0; i < t.size(); ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, bytes.data() + offset + static_cast<std::uint64_t>(i) * sizeof bits, sizeof bits);
      t[i] = std::bit_cast<double>(to_little(bits));
    }
    out.push_back({name, std::move(t)});
  }
  return out;
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

void save_network(const Network& net, const std::filesystem::path& stem, const Json& metadata) {
  std::vector<NamedTensor> tensors;
  Network copy = net;
  for (const auto& p : copy.parameters()) tensors.push_back({p.name, *p.value});
  const Json entries = write_blob(with_suffix(stem, ".bin"), tensors);
  const Json manifest{{"schema_version", 1},     {"format", "daqn-params"},
                      {"byte_order", "little"},  {"dtype", "float64"},
                      {"network", to_json(net.spec())}, {"parameters", entries},
                      {"metadata", metadata}};
  std::ofstream out(with_suffix(stem, ".json"), std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + with_suffix(stem, ".json").string() + " for writing");
  out << manifest.dump(2) << '\n';
}

Network load_network(const std::filesystem::path& stem, Json* metadata) {
  std::ifstream in(with_suffix(stem, ".json"));
  if (!in) throw std::runtime_error("cannot open " + with_suffix(stem, ".json").string());
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (field<std::string>(manifest, "byte_order", "little") != "little" ||
      field<std::string>(manifest, "dtype", "float64") != "float64")
    throw ConfigError("unsupported parameter encoding");
  Network net(network_spec_from_json(manifest.at("network")), 0);
  auto tensors = read_blob(with_suffix(stem, ".bin"), manifest.at("parameters"));
  auto params = net.parameters();
  for (auto& p : params) {
    auto it = std::find_if(tensors.begin(), tensors.end(), [&](const NamedTensor& t) { return t.name == p.name; });
    if (it == tensors.end()) throw ConfigError("manifest lacks parameter '" + p.name + "'");
    if (it->tensor.shape() != p.value->shape())
      throw ConfigError("parameter '" + p.name + "' has shape " + to_string(it->tensor.shape()) + ", expected " +
                        to_string(p.value->shape()));
    *p.value = std::move(it->tensor);
  }
  if (metadata) *metadata = field<Json>(manifest, "metadata", Json::object());
  return net;
}

}  // namespace daqn
