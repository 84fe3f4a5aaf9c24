#pragma once

#include <filesystem>

#include "daqn/nnkit/tensor.hpp"

namespace daqn {

/// Binary 8-bit PGM (P5) of a [1, H, W] or [H, W] image with values in [0, 1];
/// out-of-range values are clamped.
void write_pgm(const std::filesystem::path& path, const Tensor& image);

}  // namespace daqn
