#include "swformer/blocks.hpp"

#include <memory>
#include <vector>

namespace swformer {

BranchWidths BranchWidths::for_width(std::int64_t width, const BlockOptions& opt) {
  if (!opt.spatial_branch && !opt.wavelet_branch && !opt.fourier_branch) {
    throw ConfigError("SWFM needs at least one of the spatial, wavelet and Fourier branches");
  }
  BranchWidths b;
  b.spatial = opt.spatial_branch ? width : 0;
  b.wavelet = opt.wavelet_branch ? width : 0;
  b.fourier = opt.fourier_branch ? 2 * width : 0;
  if (!opt.spatial_branch) (opt.wavelet_branch ? b.wavelet : b.fourier) += width;
  if (!opt.wavelet_branch) (opt.spatial_branch ? b.spatial : b.fourier) += width;
  if (!opt.fourier_branch) {
    if (opt.spatial_branch && opt.wavelet_branch) {
      b.spatial += width;
      b.wavelet += width;
    } else if (opt.spatial_branch) {
      b.spatial += 2 * width;
    } else {
      b.wavelet += 2 * width;
    }
  }
  return b;
}

template <typename T>
SpatialBranch<T>::SpatialBranch(std::int64_t channels, bool linear, Rng& rng) : linear_(linear) {
  dw = this->register_module(
      "dw", std::make_unique<Conv2d<T>>(Conv2dSpec{.in = channels, .out = channels, .kernel = 3, .groups = channels},
                                        rng));
}

template <typename T>
Tensor<T> SpatialBranch<T>::forward(const Tensor<T>& x) const {
  auto y = dw->forward(x);
  return linear_ ? y : gelu(y);
}

template <typename T>
WaveletBranch<T>::WaveletBranch(std::int64_t channels, bool learnable, bool linear, Rng& rng)
    : bank(WaveletFilterBank<T>::haar(learnable)), linear_(linear) {
  if (learnable) {
    bank.analysis = this->register_parameter("analysis", bank.analysis);
    bank.synthesis = this->register_parameter("synthesis", bank.synthesis);
  } else {
    bank.analysis = this->register_buffer("analysis", bank.analysis);
    bank.synthesis = this->register_buffer("synthesis", bank.synthesis);
  }
  dw = this->register_module("dw", std::make_unique<Conv2d<T>>(
                                       Conv2dSpec{.in = 4 * channels, .out = 4 * channels, .kernel = 3,
                                                  .groups = 4 * channels},
                                       rng));
}

template <typename T>
Tensor<T> WaveletBranch<T>::forward(const Tensor<T>& x) const {
  const Shape s = x.shape();
  auto bands = dwt2_packed(x, bank.analysis, OddSizePolicy::kReflect);
  auto y = dw->forward(bands);
  if (!linear_) y = gelu(y);
  return idwt2_packed(y, bank.synthesis, s.h, s.w);
}

template <typename T>
FourierBranch<T>::FourierBranch(std::int64_t channels, FourierGate gate, bool linear, T bn_momentum, Rng& rng)
    : gate_(gate), linear_(linear) {
  if (channels % 2 != 0) {
    throw DimensionError("Fourier branch needs an even channel count, got " + std::to_string(channels));
  }
  const std::int64_t half = channels / 2;
  pre = this->register_module("pre", std::make_unique<Conv2d<T>>(Conv2dSpec{.in = channels, .out = channels}, rng));
  if (gate_ == FourierGate::kProcessed) {
    bn_fd = this->register_module("bn_fd", std::make_unique<BatchNorm2d<T>>(channels, bn_momentum));
    pw_fd = this->register_module("pw_fd", std::make_unique<Conv2d<T>>(Conv2dSpec{.in = channels, .out = channels}, rng));
    bn_ga = this->register_module("bn_ga", std::make_unique<BatchNorm2d<T>>(channels, bn_momentum));
    pw_ga = this->register_module("pw_ga", std::make_unique<Conv2d<T>>(Conv2dSpec{.in = channels, .out = channels}, rng));
  }
  post = this->register_module("post", std::make_unique<Conv2d<T>>(Conv2dSpec{.in = half, .out = half}, rng));
}

template <typename T>
Tensor<T> FourierBranch<T>::forward(const Tensor<T>& x) {
  const std::int64_t half = x.shape().c / 2;
  auto parts = split(pre->forward(x), {half, half});
  auto joint1 = fft2_packed(parts[0]);
  auto joint2 = fft2_packed(parts[1]);
  Tensor<T> product;
  if (gate_ == FourierGate::kLiteral) {
    product = mul(joint1, joint2);
  } else {
    auto fd = pw_fd->forward(bn_fd->forward(joint1));
    if (!linear_) fd = gelu(fd);
    auto ga = sigmoid(pw_ga->forward(bn_ga->forward(joint2)));
    product = mul(fd, ga);
  }
  return post->forward(ifft2_packed(product));
}

template <typename T>
ChannelAttention<T>::ChannelAttention(std::int64_t channels, std::int64_t reduction, Rng& rng) {
  const std::int64_t hidden = std::max<std::int64_t>(1, channels / std::max<std::int64_t>(1, reduction));
  squeeze = this->register_module("squeeze",
                                  std::make_unique<Conv2d<T>>(Conv2dSpec{.in = channels, .out = hidden}, rng));
  excite = this->register_module("excite",
                                 std::make_unique<Conv2d<T>>(Conv2dSpec{.in = hidden, .out = channels}, rng));
}

template <typename T>
Tensor<T> ChannelAttention<T>::weights(const Tensor<T>& x) const {
  return sigmoid(excite->forward(gelu(squeeze->forward(reduce_mean(x, kAxisHW)))));
}

template <typename T>
Tensor<T> ChannelAttention<T>::forward(const Tensor<T>& x) const {
  return mul(x, weights(x));
}

template <typename T>
SWFMixer<T>::SWFMixer(std::int64_t width, const BlockOptions& opt, Rng& rng)
    : width_(width), widths_(BranchWidths::for_width(width, opt)) {
  expand = this->register_module("expand", std::make_unique<Conv2d<T>>(Conv2dSpec{.in = width, .out = 4 * width}, rng));
  if (widths_.spatial > 0) {
    spatial = this->register_module("spatial",
                                    std::make_unique<SpatialBranch<T>>(widths_.spatial, opt.linear_test_mode, rng));
  }
  if (widths_.wavelet > 0) {
    wavelet = this->register_module("wavelet", std::make_unique<WaveletBranch<T>>(
                                                   widths_.wavelet, opt.learnable_wavelet, opt.linear_test_mode, rng));
  }
  if (widths_.fourier > 0) {
    fourier = this->register_module(
        "fourier", std::make_unique<FourierBranch<T>>(widths_.fourier, opt.gate, opt.linear_test_mode, T(0.1), rng));
  }
  attention = this->register_module(
      "attention", std::make_unique<ChannelAttention<T>>(widths_.mixed(), opt.attention_reduction, rng));
  reduce = this->register_module("reduce",
                                 std::make_unique<Conv2d<T>>(Conv2dSpec{.in = widths_.mixed(), .out = width}, rng));
}

template <typename T>
Tensor<T> SWFMixer<T>::forward(const Tensor<T>& x) {
  if (x.shape().c != width_) {
    throw DimensionError("SWFM: expected " + std::to_string(width_) + " channels on the channel axis, got " +
                         x.shape().str());
  }
  std::vector<std::int64_t> sizes;
  for (auto s : {widths_.spatial, widths_.wavelet, widths_.fourier}) {
    if (s > 0) sizes.push_back(s);
  }
  auto parts = split(expand->forward(x), sizes);
  std::vector<Tensor<T>> outs;
  std::size_t k = 0;
  if (spatial != nullptr) outs.push_back(spatial->forward(parts[k++]));
  if (wavelet != nullptr) outs.push_back(wavelet->forward(parts[k++]));
  if (fourier != nullptr) outs.push_back(fourier->forward(parts[k++]));
  auto mixed = outs.size() == 1 ? outs.front() : concat(outs);
  return reduce->forward(attention->forward(mixed));
}

template <typename T>
std::array<std::int64_t, 3> MSFN<T>::split_sizes(std::int64_t width) {
  const std::int64_t total = 2 * width;
  const std::int64_t third = total / 3;
  return {total - 2 * third, third, third};
}

template <typename T>
MSFN<T>::MSFN(std::int64_t width, bool multiscale, Rng& rng) : width_(width), multiscale_(multiscale) {
  const std::int64_t hidden = 2 * width;
  expand = this->register_module("expand", std::make_unique<Conv2d<T>>(Conv2dSpec{.in = width, .out = hidden}, rng));
  if (multiscale_) {
    const auto sizes = split_sizes(width);
    for (std::size_t i = 0; i < 3; ++i) {
      if (sizes[i] < 1) throw ConfigError("MSFN: width too small for a three-way split");
      dw[i] = this->register_module("dw" + std::to_string(i),
                                    std::make_unique<Conv2d<T>>(Conv2dSpec{.in = sizes[i], .out = sizes[i], .kernel = 3,
                                                                           .groups = sizes[i], .reflect_padding = true},
                                                                rng));
    }
  } else {
    dw[0] = this->register_module(
        "dw0", std::make_unique<Conv2d<T>>(
                   Conv2dSpec{.in = hidden, .out = hidden, .kernel = 3, .groups = hidden, .reflect_padding = true}, rng));
  }
  reduce = this->register_module("reduce", std::make_unique<Conv2d<T>>(Conv2dSpec{.in = hidden, .out = width}, rng));
}

template <typename T>
Tensor<T> MSFN<T>::forward(const Tensor<T>& x) const {
  if (x.shape().c != width_) {
    throw DimensionError("MSFN: expected " + std::to_string(width_) + " channels on the channel axis, got " +
                         x.shape().str());
  }
  auto hidden = expand->forward(x);
  Tensor<T> fused;
  if (multiscale_) {
    const auto sizes = split_sizes(width_);
    auto parts = split(hidden, {sizes[0], sizes[1], sizes[2]});
    const std::int64_t h = x.shape().h;
    const std::int64_t w = x.shape().w;
    auto full = dw[0]->forward(parts[0]);
    auto half = bilinear_resize(dw[1]->forward(avg_pool(parts[1], 2)), h, w);
    auto quarter = bilinear_resize(dw[2]->forward(avg_pool(parts[2], 4)), h, w);
    fused = concat<T>({full, half, quarter});
  } else {
    fused = dw[0]->forward(hidden);
  }
  return reduce->forward(gelu(fused));
}

template <typename T>
SWFormerBlock<T>::SWFormerBlock(std::int64_t width, const BlockOptions& opt, Rng& rng) : width_(width) {
  norm1 = this->register_module("norm1", std::make_unique<ChannelLayerNorm<T>>(width));
  mixer = this->register_module("mixer", std::make_unique<SWFMixer<T>>(width, opt, rng));
  norm2 = this->register_module("norm2", std::make_unique<ChannelLayerNorm<T>>(width));
  ffn = this->register_module("ffn", std::make_unique<MSFN<T>>(width, opt.msfn_multiscale, rng));
  if (opt.layer_scale) {
    scale1 = this->register_parameter("scale1", Tensor<T>::ones(Shape{1, width, 1, 1}));
    scale2 = this->register_parameter("scale2", Tensor<T>::ones(Shape{1, width, 1, 1}));
  }
}

template <typename T>
Tensor<T> SWFormerBlock<T>::forward(const Tensor<T>& x) {
  if (x.shape().c != width_) {
    throw DimensionError("SWFormer block: expected " + std::to_string(width_) +
                         " channels on the channel axis, got " + x.shape().str());
  }
  auto m = mixer->forward(norm1->forward(x));
  if (scale1.defined()) m = mul(m, scale1);
  auto y = add(x, m);
  auto f = ffn->forward(norm2->forward(y));
  if (scale2.defined()) f = mul(f, scale2);
  return add(y, f);
}

template class SpatialBranch<float>;
template class SpatialBranch<double>;
template class WaveletBranch<float>;
template class WaveletBranch<double>;
template class FourierBranch<float>;
template class FourierBranch<double>;
template class ChannelAttention<float>;
template class ChannelAttention<double>;
template class SWFMixer<float>;
template class SWFMixer<double>;
template class MSFN<float>;
template class MSFN<double>;
template class SWFormerBlock<float>;
template class SWFormerBlock<double>;

}  // namespace swformer
