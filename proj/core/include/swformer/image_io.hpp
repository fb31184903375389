#pragma once

#include <string>

#include "swformer/tensor.hpp"

namespace swformer {

// Reads an 8- or 16-bit PNG as a (1, 3, H, W) tensor with values mapped
// linearly to [0, 1]. Grayscale is replicated to three channels, alpha dropped.
Tensor<float> read_png(const std::string& path);

// Writes an 8-bit PNG from a (1, 1, H, W) or (1, 3, H, W) tensor, clamping
// to [0, 1] and rounding to the nearest code. The file is written to a
// temporary name and renamed into place.
void write_png(const std::string& path, const Tensor<float>& image);

// Nearest 8-bit code for every value, the quantization write_png applies.
Tensor<float> quantize8(const Tensor<float>& image);

}  // namespace swformer
