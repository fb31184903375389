#pragma once

#include <cstdint>
#include <vector>

#include "swformer/tensor.hpp"

namespace swformer {

// Elementwise binary ops. `b` may broadcast over a singleton batch, a
// singleton channel, and/or a 1x1 spatial extent; `a` is never broadcast.
template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T factor);
template <typename T>
Tensor<T> add_scalar(const Tensor<T>& x, T value);
template <typename T>
Tensor<T> abs(const Tensor<T>& x);

// Exact x * Phi(x) with Phi the standard normal CDF.
template <typename T>
Tensor<T> gelu(const Tensor<T>& x);
template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x);

struct ConvOptions {
  std::int64_t stride = 1;
  std::int64_t padding = 0;
  std::int64_t groups = 1;
};

// weight: (out_c, in_c / groups, kh, kw); bias: (1, out_c, 1, 1) or undefined.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias,
                 ConvOptions opt = {});

// Adjoint of conv2d with the same weight tensor, read as
// (in_c, out_c / groups, kh, kw). Output extent (h - 1) * stride - 2 * padding + kh.
template <typename T>
Tensor<T> conv2d_transpose(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias,
                           ConvOptions opt = {.stride = 2, .padding = 0, .groups = 1});

// Running statistics are plain tensors of shape (1, c, 1, 1) updated in
// place, only in training mode.
template <typename T>
struct BatchNormStats {
  Tensor<T> mean;
  Tensor<T> var;
};

template <typename T>
Tensor<T> batchnorm2d(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                      BatchNormStats<T>& stats, bool training, T momentum = T(0.1),
                      T eps = T(1e-5));

// Normalizes across channels at each pixel, then applies per-channel gamma/beta.
template <typename T>
Tensor<T> layer_norm_channels(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                              T eps = T(1e-6));

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts);
template <typename T>
std::vector<Tensor<T>> split(const Tensor<T>& x, const std::vector<std::int64_t>& sizes);

enum Axis : unsigned {
  kAxisN = 1u,
  kAxisC = 2u,
  kAxisH = 4u,
  kAxisW = 8u,
  kAxisHW = kAxisH | kAxisW,
  kAxisAll = kAxisN | kAxisC | kAxisH | kAxisW,
};

// Mean over the selected axes, which are kept with extent 1.
template <typename T>
Tensor<T> reduce_mean(const Tensor<T>& x, unsigned axes);
template <typename T>
Tensor<T> mean(const Tensor<T>& x) {
  return reduce_mean(x, kAxisAll);
}
template <typename T>
Tensor<T> sum(const Tensor<T>& x);

// Average pooling to ceil(h / factor) x ceil(w / factor); trailing partial
// windows average over the pixels they cover.
template <typename T>
Tensor<T> avg_pool(const Tensor<T>& x, std::int64_t factor);

// Half-pixel-centred bilinear interpolation (align_corners = false).
template <typename T>
Tensor<T> bilinear_resize(const Tensor<T>& x, std::int64_t out_h, std::int64_t out_w);

struct Padding {
  std::int64_t top = 0;
  std::int64_t bottom = 0;
  std::int64_t left = 0;
  std::int64_t right = 0;
};

// Mirror padding without edge repetition; extent-1 axes replicate.
template <typename T>
Tensor<T> pad_reflect(const Tensor<T>& x, Padding pad);
// Bottom/right only, as used to make odd extents even.
template <typename T>
Tensor<T> pad_reflect(const Tensor<T>& x, std::int64_t pad_h, std::int64_t pad_w) {
  return pad_reflect(x, Padding{0, pad_h, 0, pad_w});
}

template <typename T>
Tensor<T> crop(const Tensor<T>& x, std::int64_t top, std::int64_t left, std::int64_t h,
               std::int64_t w);

}  // namespace swformer
