#include "swformer/network.hpp"

#include <algorithm>
#include <cctype>

namespace swformer {

namespace {

std::string bool_text(bool v) { return v ? "true" : "false"; }

std::string join_ints(const std::array<std::int64_t, 5>& v) {
  std::string out;
  for (auto x : v) {
    if (!out.empty()) out += ",";
    out += std::to_string(x);
  }
  return out;
}

std::int64_t pow4(int k) { return std::int64_t{1} << (2 * k); }

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kSmall:
      return "s";
    case Variant::kMedium:
      return "m";
    case Variant::kLarge:
      return "l";
  }
  return "?";
}

Variant parse_variant(const std::string& text) {
  if (text == "s" || text == "small") return Variant::kSmall;
  if (text == "m" || text == "medium") return Variant::kMedium;
  if (text == "l" || text == "large") return Variant::kLarge;
  throw ConfigError("unknown variant '" + text + "' (expected s, m or l)");
}

const char* inter_block_name(InterBlock m) {
  switch (m) {
    case InterBlock::kSISO:
      return "siso";
    case InterBlock::kMIMO:
      return "mimo";
    case InterBlock::kLMIMO:
      return "lmimo";
  }
  return "?";
}

InterBlock parse_inter_block(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (t == "siso") return InterBlock::kSISO;
  if (t == "mimo") return InterBlock::kMIMO;
  if (t == "lmimo") return InterBlock::kLMIMO;
  throw ConfigError("unknown inter-block mode '" + text + "' (expected siso, mimo or lmimo)");
}

void ModelConfig::validate() const {
  if (width < 4 || width % 4 != 0) {
    throw ConfigError("model.width must be a positive multiple of 4, got " + std::to_string(width));
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i] < 1) throw ConfigError("model.blocks[" + std::to_string(i) + "] must be >= 1");
  }
  if (encoder_depth < 1) throw ConfigError("model.encoder_depth must be >= 1");
  if (in_channels < 1) throw ConfigError("model.in_channels must be >= 1");
  if (block.attention_reduction < 1) throw ConfigError("model.attention_reduction must be >= 1");
  if (inter_block == InterBlock::kSISO && variant != Variant::kLarge) {
    throw ConfigError("siso has a single full-resolution exit; use variant l");
  }
  BranchWidths::for_width(width, block);
}

std::int64_t ModelConfig::level_channels(int level) const {
  if (level < 0 || level > 2) throw UsageError("pyramid level must be 0, 1 or 2");
  return inter_block == InterBlock::kLMIMO ? in_channels * pow4(level) : in_channels;
}

std::vector<std::string> ModelConfig::flat_keys() {
  return {"model.preset",         "model.width",          "model.blocks",          "model.variant",
          "model.inter_block",    "model.spatial_branch", "model.wavelet_branch",  "model.fourier_branch",
          "model.learnable_wavelet", "model.msfn_multiscale", "model.fourier_gate", "model.attention_reduction",
          "model.layer_scale",    "model.encoder_depth",  "model.in_channels",     "model.zero_init_heads",
          "model.padding"};
}

FlatConfig ModelConfig::to_flat() const {
  FlatConfig f;
  f.set("model.width", std::to_string(width));
  f.set("model.blocks", join_ints(blocks));
  f.set("model.variant", variant_name(variant));
  f.set("model.inter_block", inter_block_name(inter_block));
  f.set("model.spatial_branch", bool_text(block.spatial_branch));
  f.set("model.wavelet_branch", bool_text(block.wavelet_branch));
  f.set("model.fourier_branch", bool_text(block.fourier_branch));
  f.set("model.learnable_wavelet", bool_text(block.learnable_wavelet));
  f.set("model.msfn_multiscale", bool_text(block.msfn_multiscale));
  f.set("model.fourier_gate", block.gate == FourierGate::kLiteral ? "literal" : "processed");
  f.set("model.attention_reduction", std::to_string(block.attention_reduction));
  f.set("model.layer_scale", bool_text(block.layer_scale));
  f.set("model.encoder_depth", std::to_string(encoder_depth));
  f.set("model.in_channels", std::to_string(in_channels));
  f.set("model.zero_init_heads", bool_text(zero_init_heads));
  f.set("model.padding", padding == OddSizePolicy::kReflect ? "reflect" : "reject");
  return f;
}

ModelConfig ModelConfig::from_flat(const FlatConfig& cfg) {
  ModelConfig m;
  const std::string preset = cfg.get("model.preset", "desk");
  if (preset == "tiny") {
    m = tiny();
  } else if (preset == "desk") {
    m = desk();
  } else if (preset == "s" || preset == "m" || preset == "l") {
    m = full_scale(parse_variant(preset));
  } else {
    throw ConfigError("unknown model.preset '" + preset + "' (expected tiny, desk, s, m or l)");
  }
  m.width = cfg.get_int("model.width", m.width);
  if (cfg.has("model.blocks")) {
    const auto b = cfg.get_ints("model.blocks", {});
    if (b.size() == 1) {
      m.blocks.fill(b[0]);
    } else if (b.size() == 5) {
      std::copy(b.begin(), b.end(), m.blocks.begin());
    } else {
      throw ConfigError("model.blocks needs 1 or 5 entries, got " + std::to_string(b.size()));
    }
  }
  if (cfg.has("model.variant")) m.variant = parse_variant(cfg.get("model.variant", ""));
  if (cfg.has("model.inter_block")) m.inter_block = parse_inter_block(cfg.get("model.inter_block", ""));
  m.block.spatial_branch = cfg.get_bool("model.spatial_branch", m.block.spatial_branch);
  m.block.wavelet_branch = cfg.get_bool("model.wavelet_branch", m.block.wavelet_branch);
  m.block.fourier_branch = cfg.get_bool("model.fourier_branch", m.block.fourier_branch);
  m.block.learnable_wavelet = cfg.get_bool("model.learnable_wavelet", m.block.learnable_wavelet);
  m.block.msfn_multiscale = cfg.get_bool("model.msfn_multiscale", m.block.msfn_multiscale);
  if (cfg.has("model.fourier_gate")) {
    const auto g = cfg.get("model.fourier_gate", "");
    if (g == "processed") {
      m.block.gate = FourierGate::kProcessed;
    } else if (g == "literal") {
      m.block.gate = FourierGate::kLiteral;
    } else {
      throw ConfigError("model.fourier_gate must be processed or literal, got '" + g + "'");
    }
  }
  m.block.attention_reduction = cfg.get_int("model.attention_reduction", m.block.attention_reduction);
  m.block.layer_scale = cfg.get_bool("model.layer_scale", m.block.layer_scale);
  m.encoder_depth = cfg.get_int("model.encoder_depth", m.encoder_depth);
  m.in_channels = cfg.get_int("model.in_channels", m.in_channels);
  m.zero_init_heads = cfg.get_bool("model.zero_init_heads", m.zero_init_heads);
  if (cfg.has("model.padding")) {
    const auto p = cfg.get("model.padding", "");
    if (p == "reflect") {
      m.padding = OddSizePolicy::kReflect;
    } else if (p == "reject") {
      m.padding = OddSizePolicy::kReject;
    } else {
      throw ConfigError("model.padding must be reflect or reject, got '" + p + "'");
    }
  }
  m.validate();
  return m;
}

ModelConfig ModelConfig::tiny() {
  ModelConfig m;
  m.width = 8;
  m.blocks = {1, 1, 1, 1, 1};
  return m;
}

ModelConfig ModelConfig::desk() { return ModelConfig{}; }

ModelConfig ModelConfig::full_scale(Variant v) {
  ModelConfig m;
  m.width = 32;
  m.blocks = {2, 4, 6, 4, 2};
  m.variant = v;
  return m;
}

template <typename T>
const WaveletFilterBank<T>& fixed_haar() {
  static const WaveletFilterBank<T> bank = WaveletFilterBank<T>::haar(false);
  return bank;
}

template <typename T>
MultiScaleImage<T> decompose_input(const Tensor<T>& image, InterBlock mode) {
  const Shape s = image.shape();
  if (s.h < 8 || s.w < 8) {
    throw DimensionError("input " + s.str() + " is smaller than the 8x8 minimum");
  }
  MultiScaleImage<T> out;
  out.mode = mode;
  out.height = s.h;
  out.width = s.w;
  const std::int64_t ph = (4 - s.h % 4) % 4;
  const std::int64_t pw = (4 - s.w % 4) % 4;
  out.levels[0] = pad_reflect(image, ph, pw);
  const std::int64_t H = s.h + ph;
  const std::int64_t W = s.w + pw;
  if (mode == InterBlock::kLMIMO) {
    const auto& bank = fixed_haar<T>();
    out.levels[1] = dwt2_packed(out.levels[0], bank.analysis);
    out.levels[2] = dwt2_packed(out.levels[1], bank.analysis);
  } else if (mode == InterBlock::kMIMO) {
    out.levels[1] = bilinear_resize(out.levels[0], H / 2, W / 2);
    out.levels[2] = bilinear_resize(out.levels[0], H / 4, W / 4);
  }
  return out;
}

template <typename T>
Tensor<T> reconstruct_output(const Tensor<T>& level_image, int level, std::int64_t height, std::int64_t width,
                             InterBlock mode) {
  if (level < 0 || level > 2) throw UsageError("pyramid level must be 0, 1 or 2");
  const Shape s = level_image.shape();
  const std::int64_t H = s.h << level;
  const std::int64_t W = s.w << level;
  if (height > H || width > W) {
    throw DimensionError("cannot crop level-" + std::to_string(level) + " output " + s.str() + " to " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
  Tensor<T> x = level_image;
  if (mode == InterBlock::kLMIMO) {
    if (s.c % pow4(level) != 0) {
      throw DimensionError("level-" + std::to_string(level) + " output needs a multiple of " +
                           std::to_string(pow4(level)) + " channels, got " + s.str());
    }
    const auto& bank = fixed_haar<T>();
    for (int k = 0; k < level; ++k) x = idwt2_packed(x, bank.synthesis);
  } else if (level > 0) {
    x = bilinear_resize(x, H, W);
  }
  return crop(x, 0, 0, height, width);
}

template <typename T>
ConvStack<T>::ConvStack(std::int64_t in, std::int64_t hidden, std::int64_t out, std::int64_t depth, Rng& rng) {
  for (std::int64_t i = 0; i < depth; ++i) {
    const std::int64_t ci = i == 0 ? in : hidden;
    const std::int64_t co = i + 1 == depth ? out : hidden;
    convs.push_back(this->register_module("conv" + std::to_string(i),
                                          std::make_unique<Conv2d<T>>(Conv2dSpec{.in = ci, .out = co, .kernel = 3},
                                                                      rng)));
  }
}

template <typename T>
Tensor<T> ConvStack<T>::forward(const Tensor<T>& x) const {
  Tensor<T> y = x;
  for (std::size_t i = 0; i < convs.size(); ++i) {
    if (i > 0) y = gelu(y);
    y = convs[i]->forward(y);
  }
  return y;
}

template <typename T>
SWFormerNet<T>::SWFormerNet(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(seed);
  const auto w = cfg_.stage_widths();
  const int max_stage = 3 + static_cast<int>(cfg_.variant);  // last stage built
  const bool multi = cfg_.inter_block != InterBlock::kSISO;
  auto pw = [&](const std::string& name, std::int64_t in, std::int64_t out) {
    return this->register_module(name, std::make_unique<Conv2d<T>>(Conv2dSpec{.in = in, .out = out}, rng));
  };
  auto make_stage = [&](int s) {
    for (std::int64_t b = 0; b < cfg_.blocks[s]; ++b) {
      stages[s].push_back(this->register_module("stage" + std::to_string(s + 1) + "." + std::to_string(b),
                                                std::make_unique<SWFormerBlock<T>>(w[s], cfg_.block, rng)));
    }
  };
  auto make_encoder = [&](int level, std::int64_t width) {
    encoders[level] = this->register_module(
        "encoder" + std::to_string(level),
        std::make_unique<ConvStack<T>>(cfg_.level_channels(level), width, width, cfg_.encoder_depth, rng));
  };
  auto make_head = [&](int level, std::int64_t width) {
    heads[level] = this->register_module(
        "head" + std::to_string(level),
        std::make_unique<ConvStack<T>>(width, width, cfg_.level_channels(level), cfg_.encoder_depth, rng));
  };

  make_encoder(0, w[0]);
  make_stage(0);
  down1 = pw("down1", 4 * w[0], w[1]);
  if (multi) {
    make_encoder(1, w[1]);
    fuse2 = pw("fuse2", 2 * w[1], w[1]);
  }
  make_stage(1);
  down2 = pw("down2", 4 * w[1], w[2]);
  if (multi) {
    make_encoder(2, w[2]);
    fuse3 = pw("fuse3", 2 * w[2], w[2]);
  }
  make_stage(2);
  if (multi) make_head(2, w[2]);
  if (max_stage >= 4) {
    up1 = pw("up1", w[2], 4 * w[3]);
    skip4 = pw("skip4", 2 * w[3], w[3]);
    make_stage(3);
    if (multi) make_head(1, w[3]);
  }
  if (max_stage >= 5) {
    up2 = pw("up2", w[3], 4 * w[4]);
    skip5 = pw("skip5", 2 * w[4], w[4]);
    make_stage(4);
    make_head(0, w[4]);
  }
  if (cfg_.zero_init_heads) zero_residual_heads();
}

template <typename T>
void SWFormerNet<T>::zero_residual_heads() {
  for (auto* h : heads) {
    if (h != nullptr) h->convs.back()->zero_init();
  }
}

template <typename T>
Tensor<T> SWFormerNet<T>::run_stage(int stage, Tensor<T> x) {
  try {
    for (auto* b : stages[stage]) x = b->forward(x);
  } catch (const DimensionError& e) {
    throw DimensionError("stage " + std::to_string(stage + 1) + ": " + e.what());
  }
  return x;
}

template <typename T>
Tensor<T> SWFormerNet<T>::fuse_multi_input(int stage, const Tensor<T>& stage_features,
                                           const Tensor<T>& encoded) const {
  Conv2d<T>* fuse = stage == 2 ? fuse2 : stage == 3 ? fuse3 : nullptr;
  if (fuse == nullptr) {
    throw UsageError("multi-input fusion exists at stages 2 and 3 of a mimo/lmimo network, not stage " +
                     std::to_string(stage));
  }
  const Shape a = stage_features.shape();
  const Shape b = encoded.shape();
  if (a.n != b.n || a.h != b.h || a.w != b.w) {
    throw DimensionError("stage " + std::to_string(stage) + " fusion: scale mismatch between features " + a.str() +
                         " and encoded input " + b.str());
  }
  return fuse->forward(concat<T>({stage_features, encoded}));
}

template <typename T>
NetOutput<T> SWFormerNet<T>::forward(const MultiScaleImage<T>& input, std::optional<Variant> variant) {
  const Variant v = variant.value_or(cfg_.variant);
  if (static_cast<int>(v) > static_cast<int>(cfg_.variant)) {
    throw UsageError(std::string("network built as variant ") + variant_name(cfg_.variant) +
                     " cannot run variant " + variant_name(v));
  }
  if (input.mode != cfg_.inter_block) {
    throw UsageError(std::string("input pyramid is ") + inter_block_name(input.mode) + ", network expects " +
                     inter_block_name(cfg_.inter_block));
  }
  const bool multi = cfg_.inter_block != InterBlock::kSISO;
  for (int k = 0; k < (multi ? 3 : 1); ++k) {
    const auto& img = input.levels[k];
    if (!img.defined() || img.shape().c != cfg_.level_channels(k)) {
      throw DimensionError("pyramid level " + std::to_string(k) + " must have " +
                           std::to_string(cfg_.level_channels(k)) + " channels" +
                           (img.defined() ? ", got " + img.shape().str() : std::string()));
    }
  }
  const Shape s0 = input.levels[0].shape();
  if (s0.h % 4 != 0 || s0.w % 4 != 0) {
    throw DimensionError("level-0 input " + s0.str() + " must have extents divisible by 4");
  }

  NetOutput<T> out;
  Tensor<T> f1;
  try {
    f1 = encoders[0]->forward(input.levels[0]);
  } catch (const DimensionError& e) {
    throw DimensionError(std::string("stage 1 encoder: ") + e.what());
  }
  f1 = run_stage(0, f1);

  auto x = down1->forward(pixel_unshuffle(f1));
  if (multi) x = fuse_multi_input(2, x, encoders[1]->forward(input.levels[1]));
  auto f2 = run_stage(1, x);

  x = down2->forward(pixel_unshuffle(f2));
  if (multi) x = fuse_multi_input(3, x, encoders[2]->forward(input.levels[2]));
  auto f3 = run_stage(2, x);
  if (multi) out.levels[2] = add(input.levels[2], heads[2]->forward(f3));
  if (v == Variant::kSmall) return out;

  x = pixel_shuffle(up1->forward(f3));
  x = skip4->forward(concat<T>({x, f2}));
  auto f4 = run_stage(3, x);
  if (multi) out.levels[1] = add(input.levels[1], heads[1]->forward(f4));
  if (v == Variant::kMedium) return out;

  x = pixel_shuffle(up2->forward(f4));
  x = skip5->forward(concat<T>({x, f1}));
  auto f5 = run_stage(4, x);
  out.levels[0] = add(input.levels[0], heads[0]->forward(f5));
  return out;
}

template <typename T>
std::array<std::optional<Tensor<T>>, 3> SWFormerNet<T>::restore(const Tensor<T>& image,
                                                                 std::optional<Variant> variant) {
  const Shape s = image.shape();
  if (cfg_.padding == OddSizePolicy::kReject && (s.h % 4 != 0 || s.w % 4 != 0)) {
    throw DimensionError("input " + s.str() + " is not divisible by 4 and model.padding is reject");
  }
  auto pyramid = decompose_input(image, cfg_.inter_block);
  auto o = forward(pyramid, variant);
  std::array<std::optional<Tensor<T>>, 3> images;
  for (int k = 0; k < 3; ++k) {
    if (o.levels[k]) images[k] = reconstruct_output(*o.levels[k], k, s.h, s.w, cfg_.inter_block);
  }
  return images;
}

std::int64_t count_params(const ModelConfig& cfg) {
  SWFormerNet<float> net(cfg, 0);
  return net.parameter_count();
}

#define SWFORMER_INSTANTIATE_NETWORK(T)                                                                  \
  template const WaveletFilterBank<T>& fixed_haar<T>();                                                  \
  template MultiScaleImage<T> decompose_input<T>(const Tensor<T>&, InterBlock);                          \
  template Tensor<T> reconstruct_output<T>(const Tensor<T>&, int, std::int64_t, std::int64_t, InterBlock); \
  template class ConvStack<T>;                                                                           \
  template class SWFormerNet<T>;

SWFORMER_INSTANTIATE_NETWORK(float)
SWFORMER_INSTANTIATE_NETWORK(double)

}  // namespace swformer
