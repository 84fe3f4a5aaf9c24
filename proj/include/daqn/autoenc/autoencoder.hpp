#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "daqn/nnkit/network.hpp"
#include "daqn/nnkit/normalization.hpp"
#include "daqn/nnkit/serialize.hpp"

namespace daqn {

/// Encoder (input -> code) and decoder (code -> input) with untied weights.
struct AutoEncoder {
  Network encoder;
  Network decoder;

  const Shape& input_shape() const { return encoder.input_shape(); }
  const Shape& latent_shape() const { return encoder.output_shape(); }
};

/// Fully connected auto-encoder over `widths` = [input, hidden..., latent].
/// The encoder is dense+relu all the way down; the decoder mirrors it back up
/// and its final dense layer is linear so reconstructions may be negative.
AutoEncoder build_dense_ae(std::span<const int> widths, std::uint64_t seed);

/// Convolutional auto-encoder. `encoder_layers` may contain conv2d (stride 1),
/// maxpool2d (stride == window) and relu only. The decoder mirrors it: every
/// pool becomes a nearest-neighbour upsample by the window, every conv a conv
/// with swapped channel counts and padding k-1-p so spatial sizes invert.
/// Every pooled dimension must be divisible by the window; the offending
/// layer is named otherwise.
AutoEncoder build_conv_ae(const Shape& input_shape, std::span<const LayerSpec> encoder_layers, std::uint64_t seed);

/// decoder(encoder(x)) for one sample or a batch.
Tensor reconstruct(AutoEncoder& ae, const Tensor& x);

/// Writes `<stem>.encoder.*`, `<stem>.decoder.*` and a `<stem>.json` sidecar
/// holding `sidecar` (normalization statistics, training config, ...).
void save_autoencoder(const AutoEncoder& ae, const std::filesystem::path& stem, const Json& sidecar);
AutoEncoder load_autoencoder(const std::filesystem::path& stem, Json* sidecar = nullptr);

}  // namespace daqn
