#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "swformer/config.hpp"
#include "swformer/tensor.hpp"

namespace swformer {

struct LossConfig {
  double lambda_fourier = 0.1;
  double wavelet_weight = 1.0;
  std::array<double, 3> scale_weights{1.0, 1.0, 1.0};  // per pyramid level

  void validate() const;
  [[nodiscard]] FlatConfig to_flat() const;  // keys under "loss."
  static LossConfig from_flat(const FlatConfig& cfg);
  static std::vector<std::string> flat_keys();
};

// Unweighted per-term sums over the supervised levels; `total` applies the
// weights. All terms are mean-reduced L1.
template <typename T>
struct LossTerms {
  Tensor<T> total;
  Tensor<T> spatial;
  Tensor<T> wavelet;
  Tensor<T> fourier;
};

// One level: mean|O-G| + w_wav * mean|W(O-G)| + lambda * mean over real and
// imaginary parts of F(O-G). W is the fixed Haar bank, F the orthonormal FFT.
template <typename T>
LossTerms<T> domain_loss(const Tensor<T>& output, const Tensor<T>& target, const LossConfig& cfg);

// Sums domain_loss over the levels present in `outputs`; each of them needs a
// target of the same shape.
template <typename T>
LossTerms<T> multi_domain_loss(const std::array<std::optional<Tensor<T>>, 3>& outputs,
                               const std::array<std::optional<Tensor<T>>, 3>& targets, const LossConfig& cfg);

// +inf when the inputs are identical.
double psnr(const Tensor<float>& x, const Tensor<float>& y, double max_val = 1.0);
// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5) over valid positions,
// K1 = 0.01, K2 = 0.03, dynamic range 1. Averaged over batch and channels.
double ssim(const Tensor<float>& x, const Tensor<float>& y);

// Luma coefficient sets. Full range maps white to 1 and black to 0; studio
// swing maps them to 235/255 and 16/255.
enum class LumaRange { kFull, kStudio };
Tensor<float> to_y_channel(const Tensor<float>& rgb, LumaRange range = LumaRange::kFull);

struct ImageMetric {
  std::string id;
  double psnr_db = 0;
  double ssim = 0;
};

struct MetricReport {
  bool y_channel = false;
  std::vector<ImageMetric> images;
  double mean_psnr = 0;  // +inf if any image is identical to its reference
  double mean_ssim = 0;

  void add(ImageMetric m);
  // One JSON record per image, then a summary record. Infinite PSNR is
  // written as the string "inf".
  [[nodiscard]] std::string to_jsonl() const;
};

// Metrics for one (restored, reference) pair of (1, 3, H, W) images.
ImageMetric evaluate_pair(const std::string& id, const Tensor<float>& restored, const Tensor<float>& reference,
                          bool y_channel, LumaRange range = LumaRange::kFull);

}  // namespace swformer
