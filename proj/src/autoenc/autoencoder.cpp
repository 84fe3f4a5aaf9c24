#include "daqn/autoenc/autoencoder.hpp"

#include <fstream>

namespace daqn {

AutoEncoder build_dense_ae(std::span<const int> widths, std::uint64_t seed) {
  if (widths.size() < 2) throw ShapeError("dense auto-encoder needs at least an input and a latent width");
  for (std::size_t i = 0; i < widths.size(); ++i)
    if (widths[i] < 1) throw ShapeError("dense auto-encoder width " + std::to_string(i) + " must be >= 1");

  NetworkSpec enc{{widths.front()}, {}};
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    enc.layers.push_back(LayerSpec::dense(widths[i], widths[i + 1]));
    enc.layers.push_back(LayerSpec::relu());
  }
  NetworkSpec dec{{widths.back()}, {}};
  for (std::size_t i = widths.size() - 1; i > 0; --i) {
    dec.layers.push_back(LayerSpec::dense(widths[i], widths[i - 1]));
    if (i > 1) dec.layers.push_back(LayerSpec::relu());
  }
  return {Network(std::move(enc), seed), Network(std::move(dec), seed + 1)};
}

AutoEncoder build_conv_ae(const Shape& input_shape, std::span<const LayerSpec> encoder_layers, std::uint64_t seed) {
  NetworkSpec enc{input_shape, {encoder_layers.begin(), encoder_layers.end()}};
  const auto shapes = shape_chain(enc);
  for (std::size_t i = 0; i < enc.layers.size(); ++i) {
    const LayerSpec& l = enc.layers[i];
    const std::string where = "encoder layer " + std::to_string(i) + " (" + describe(l) + ")";
    switch (l.kind) {
      case LayerKind::conv2d:
        if (l.stride != 1) throw ShapeError(where + ": only stride-1 convolutions can be mirrored");
        break;
      case LayerKind::maxpool2d:
        if (l.stride != l.window) throw ShapeError(where + ": pooling stride must equal its window");
        if (shapes[i][1] % l.window != 0 || shapes[i][2] % l.window != 0)
          throw ShapeError(where + ": input " + to_string(shapes[i]) + " has a dimension not divisible by " +
                           std::to_string(l.window));
        break;
      case LayerKind::relu:
        break;
      default:
        throw ShapeError(where + ": convolutional encoders take conv2d, maxpool2d and relu only");
    }
  }

  NetworkSpec dec{shapes.back(), {}};
  std::size_t remaining_convs = 0;
  for (const auto& l : enc.layers) remaining_convs += l.kind == LayerKind::conv2d;
  for (std::size_t i = enc.layers.size(); i-- > 0;) {
    const LayerSpec& l = enc.layers[i];
    if (l.kind == LayerKind::maxpool2d) {
      dec.layers.push_back(LayerSpec::upsample2d(l.window));
    } else if (l.kind == LayerKind::conv2d) {
      dec.layers.push_back(
          LayerSpec::conv2d(l.out_channels, l.in_channels, l.kernel_size, 1, l.kernel_size - 1 - l.padding));
      if (--remaining_convs > 0) dec.layers.push_back(LayerSpec::relu());
    }
  }
  if (shape_chain(dec).back() != input_shape)
    throw ShapeError("decoder output " + to_string(shape_chain(dec).back()) + " does not invert input " +
                     to_string(input_shape));
  return {Network(std::move(enc), seed), Network(std::move(dec), seed + 1)};
}

Tensor reconstruct(AutoEncoder& ae, const Tensor& x) { return ae.decoder.forward(ae.encoder.forward(x)); }

void save_autoencoder(const AutoEncoder& ae, const std::filesystem::path& stem, const Json& sidecar) {
  save_network(ae.encoder, with_suffix(stem, ".encoder"), Json{{"role", "encoder"}});
  save_network(ae.decoder, with_suffix(stem, ".decoder"), Json{{"role", "decoder"}});
  std::ofstream out(with_suffix(stem, ".json"), std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + with_suffix(stem, ".json").string());
  out << sidecar.dump(2) << '\n';
}

AutoEncoder load_autoencoder(const std::filesystem::path& stem, Json* sidecar) {
  AutoEncoder ae{load_network(with_suffix(stem, ".encoder")), load_network(with_suffix(stem, ".decoder"))};
  if (sidecar) {
    std::ifstream in(with_suffix(stem, ".json"));
    if (!in) throw std::runtime_error("cannot read " + with_suffix(stem, ".json").string());
    *sidecar = Json::parse(in);
  }
  return ae;
}

}  // namespace daqn
