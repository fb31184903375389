#pragma once

#include <array>
#include <cstdint>

#include "swformer/module.hpp"
#include "swformer/transforms.hpp"

namespace swformer {

// What the Fourier branch multiplies before the inverse FFT.
enum class FourierGate {
  kProcessed,  // F_fd (BN, pw, GELU of F_j1) times F_ga (BN, pw, Sigmoid of F_j2)
  kLiteral,    // F_j1 times F_j2 directly
};

struct BlockOptions {
  bool spatial_branch = true;
  bool wavelet_branch = true;
  bool fourier_branch = true;
  bool learnable_wavelet = true;
  bool msfn_multiscale = true;  // false: a single full-resolution depthwise path
  FourierGate gate = FourierGate::kProcessed;
  std::int64_t attention_reduction = 4;
  bool layer_scale = false;     // per-channel residual scale, initialized to 1
  bool linear_test_mode = false;  // GELUs inside the branches become identity
};

// Channel shares of the 4C expansion. With every branch on this is
// [C, C, 2C]; a disabled branch hands its share to the others.
struct BranchWidths {
  std::int64_t spatial = 0;
  std::int64_t wavelet = 0;
  std::int64_t fourier = 0;  // input channels; the branch emits fourier / 2

  static BranchWidths for_width(std::int64_t width, const BlockOptions& opt);
  [[nodiscard]] std::int64_t mixed() const { return spatial + wavelet + fourier / 2; }
};

// Depthwise 3x3 then GELU.
template <typename T>
class SpatialBranch : public Module<T> {
 public:
  SpatialBranch(std::int64_t channels, bool linear, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x) const;
  Conv2d<T>* dw;

 private:
  bool linear_;
};

// Learnable DWT, depthwise 3x3 over the 4C concatenated sub-bands, GELU,
// learnable inverse DWT. Odd extents are reflect-padded and cropped back.
template <typename T>
class WaveletBranch : public Module<T> {
 public:
  WaveletBranch(std::int64_t channels, bool learnable, bool linear, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x) const;
  WaveletFilterBank<T> bank;
  Conv2d<T>* dw;

 private:
  bool linear_;
};

template <typename T>
class FourierBranch : public Module<T> {
 public:
  FourierBranch(std::int64_t channels, FourierGate gate, bool linear, T bn_momentum, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x);

  Conv2d<T>* pre;
  // gate path, absent for the literal gate
  BatchNorm2d<T>* bn_fd = nullptr;
  Conv2d<T>* pw_fd = nullptr;
  BatchNorm2d<T>* bn_ga = nullptr;
  Conv2d<T>* pw_ga = nullptr;
  Conv2d<T>* post;

 private:
  FourierGate gate_;
  bool linear_;
};

// Squeeze-excite: global average pool, 1x1 reduce, GELU, 1x1 expand, Sigmoid.
template <typename T>
class ChannelAttention : public Module<T> {
 public:
  ChannelAttention(std::int64_t channels, std::int64_t reduction, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> weights(const Tensor<T>& x) const;
  Conv2d<T>* squeeze;
  Conv2d<T>* excite;
};

template <typename T>
class SWFMixer : public Module<T> {
 public:
  SWFMixer(std::int64_t width, const BlockOptions& opt, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x);
  [[nodiscard]] const BranchWidths& widths() const { return widths_; }

  Conv2d<T>* expand;
  SpatialBranch<T>* spatial = nullptr;
  WaveletBranch<T>* wavelet = nullptr;
  FourierBranch<T>* fourier = nullptr;
  ChannelAttention<T>* attention;
  Conv2d<T>* reduce;

 private:
  std::int64_t width_;
  BranchWidths widths_;
};

// Multi-scale ConvFFN: expand to 2C, split three ways, depthwise 3x3 at full,
// half and quarter resolution, upsample, concatenate, GELU, reduce to C.
template <typename T>
class MSFN : public Module<T> {
 public:
  MSFN(std::int64_t width, bool multiscale, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x) const;
  // Channel counts of the scale-1, scale-1/2 and scale-1/4 parts. The
  // remainder of 2C / 3 goes to the scale-1 part.
  static std::array<std::int64_t, 3> split_sizes(std::int64_t width);

  Conv2d<T>* expand;
  std::array<Conv2d<T>*, 3> dw{};
  Conv2d<T>* reduce;

 private:
  std::int64_t width_;
  bool multiscale_;
};

// x + Mixer(LN(x)), then + MSFN(LN(.)).
template <typename T>
class SWFormerBlock : public Module<T> {
 public:
  SWFormerBlock(std::int64_t width, const BlockOptions& opt, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x);
  [[nodiscard]] std::int64_t width() const { return width_; }

  ChannelLayerNorm<T>* norm1;
  SWFMixer<T>* mixer;
  ChannelLayerNorm<T>* norm2;
  MSFN<T>* ffn;
  Tensor<T> scale1;  // defined only with layer_scale
  Tensor<T> scale2;

 private:
  std::int64_t width_;
};

}  // namespace swformer
