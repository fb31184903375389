#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "swformer/blocks.hpp"
#include "swformer/config.hpp"

namespace swformer {

// Early-exit depth: small stops after stage 3 (quarter-scale output),
// medium after stage 4, large runs all five stages.
enum class Variant { kSmall = 0, kMedium = 1, kLarge = 2 };

// Inter-block design. SISO: one input and one output at full resolution.
// MIMO: bilinear 3-channel images at the auxiliary scales. LMIMO: lossless
// Haar pyramids (3, 12, 48 channels) in and out.
enum class InterBlock { kSISO, kMIMO, kLMIMO };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& text);
const char* inter_block_name(InterBlock m);
InterBlock parse_inter_block(const std::string& text);

// Pyramid level produced at each exit: small -> 2, medium -> 1, large -> 0.
inline int exit_level(Variant v) { return 2 - static_cast<int>(v); }

struct ModelConfig {
  std::int64_t width = 16;
  std::array<std::int64_t, 5> blocks{2, 2, 2, 2, 2};
  Variant variant = Variant::kLarge;
  InterBlock inter_block = InterBlock::kLMIMO;
  BlockOptions block;
  std::int64_t encoder_depth = 2;  // 3x3 convs per encoder / decoder layer
  std::int64_t in_channels = 3;
  bool zero_init_heads = false;
  OddSizePolicy padding = OddSizePolicy::kReflect;

  void validate() const;
  [[nodiscard]] std::array<std::int64_t, 5> stage_widths() const {
    return {width, 2 * width, 3 * width, 2 * width, width};
  }
  // Channels of the pyramid image at `level` for this inter-block mode.
  [[nodiscard]] std::int64_t level_channels(int level) const;

  [[nodiscard]] FlatConfig to_flat() const;  // keys under "model."
  static ModelConfig from_flat(const FlatConfig& cfg);
  static std::vector<std::string> flat_keys();

  // C=8, one block per stage: gradient checks and smoke training.
  static ModelConfig tiny();
  // C=16, two blocks per stage.
  static ModelConfig desk();
  // Full-size approximations; not exercised in tests.
  static ModelConfig full_scale(Variant v);
};

// Multi-scale input or target images. LMIMO level k is k full-band Haar
// decompositions, (n, 3 * 4^k, H / 2^k, W / 2^k). MIMO levels are bilinear
// downsamples with 3 channels; SISO keeps level 0 only.
template <typename T>
struct MultiScaleImage {
  std::array<Tensor<T>, 3> levels;
  InterBlock mode = InterBlock::kLMIMO;
  std::int64_t height = 0;  // before padding
  std::int64_t width = 0;
};

// Fixed (non-learnable) orthonormal Haar bank.
template <typename T>
const WaveletFilterBank<T>& fixed_haar();

// Reflect-pads to a multiple of 4 and builds the pyramid. Images below 8x8
// are rejected.
template <typename T>
MultiScaleImage<T> decompose_input(const Tensor<T>& image, InterBlock mode = InterBlock::kLMIMO);

// Inverts one pyramid level back to (n, 3, H, W), cropping any padding.
template <typename T>
Tensor<T> reconstruct_output(const Tensor<T>& level_image, int level, std::int64_t height, std::int64_t width,
                             InterBlock mode = InterBlock::kLMIMO);

template <typename T>
struct NetOutput {
  std::array<std::optional<Tensor<T>>, 3> levels;  // O at each available pyramid level
};

// Encoder/decoder layer: 3x3 convs with GELU between them.
template <typename T>
class ConvStack : public Module<T> {
 public:
  ConvStack(std::int64_t in, std::int64_t hidden, std::int64_t out, std::int64_t depth, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x) const;
  std::vector<Conv2d<T>*> convs;
};

template <typename T>
class SWFormerNet : public Module<T> {
 public:
  SWFormerNet(const ModelConfig& cfg, std::uint64_t seed);

  // Runs up to the exit of `variant` (defaults to the built variant), which
  // must not exceed the built one.
  NetOutput<T> forward(const MultiScaleImage<T>& input, std::optional<Variant> variant = std::nullopt);
  // Decomposes, runs and reconstructs one image batch, per available exit.
  std::array<std::optional<Tensor<T>>, 3> restore(const Tensor<T>& image, std::optional<Variant> variant = std::nullopt);

  // concat(stage features, encoded input) followed by the 1x1 fusion conv.
  Tensor<T> fuse_multi_input(int stage, const Tensor<T>& stage_features, const Tensor<T>& encoded) const;
  // Zeroes the last conv of every residual head so O == I.
  void zero_residual_heads();

  [[nodiscard]] const ModelConfig& config() const { return cfg_; }

  std::array<ConvStack<T>*, 3> encoders{};  // per pyramid level
  std::array<std::vector<SWFormerBlock<T>*>, 5> stages;
  Conv2d<T>* down1 = nullptr;  // after pixel_unshuffle, 4C -> 2C
  Conv2d<T>* down2 = nullptr;  // 8C -> 3C
  Conv2d<T>* fuse2 = nullptr;  // multi-input fusion at stage 2
  Conv2d<T>* fuse3 = nullptr;
  Conv2d<T>* up1 = nullptr;  // 3C -> 8C before pixel_shuffle
  Conv2d<T>* up2 = nullptr;  // 2C -> 4C
  Conv2d<T>* skip4 = nullptr;  // concat(up, stage-2 features) -> 2C
  Conv2d<T>* skip5 = nullptr;
  std::array<ConvStack<T>*, 3> heads{};  // per pyramid level

 private:
  Tensor<T> run_stage(int stage, Tensor<T> x);
  ModelConfig cfg_;
};

// Trainable scalars of a network built from `cfg`.
std::int64_t count_params(const ModelConfig& cfg);

}  // namespace swformer
