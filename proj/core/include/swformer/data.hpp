#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swformer/config.hpp"
#include "swformer/tensor.hpp"

namespace swformer {

enum class DegradationKind { kRainStreaks, kHaze, kGaussianBlur, kLowLight };

const char* degradation_name(DegradationKind k);
DegradationKind parse_degradation(const std::string& text);

struct DegradationSpec {
  DegradationKind kind = DegradationKind::kRainStreaks;
  // rain_streaks
  std::int64_t streak_count = 60;
  double streak_angle_deg = 75;  // from the horizontal
  double angle_jitter_deg = 5;
  double streak_length = 12;
  double streak_intensity = 0.35;
  // haze: transmission drawn per pixel from a smooth field in [t_min, t_max]
  double t_min = 0.4;
  double t_max = 0.9;
  double airlight = 0.9;
  // gaussian_blur
  double blur_sigma = 1.5;
  // low_light: gain * x^gamma + N(0, noise_sigma^2)
  double gamma = 2.0;
  double gain = 1.0;
  double noise_sigma = 0.02;
  std::uint64_t seed = 0;

  void validate() const;
  // Keys under `prefix` (e.g. "data.degradation.").
  [[nodiscard]] FlatConfig to_flat(const std::string& prefix) const;
  static DegradationSpec from_flat(const FlatConfig& cfg, const std::string& prefix);
  static std::vector<std::string> flat_keys(const std::string& prefix);
};

// Images are (1, 3, H, W) with values in [0, 1].
struct PairedSample {
  Tensor<float> degraded;
  Tensor<float> clean;
  std::string id;
};

enum class CleanKind { kGradient, kCheckerboard, kSmoothField, kGlyphs };

Tensor<float> make_clean(CleanKind kind, std::int64_t height, std::int64_t width, std::uint64_t seed);

// Normalized 1D Gaussian taps of radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

PairedSample synth_pair(const Tensor<float>& clean, const DegradationSpec& spec, const std::string& id = "");

// Image i uses clean kind i mod 4 and degradation specs[i mod specs.size()],
// each with its own seed derived from (seed, i), so the result does not
// depend on `workers`.
std::vector<PairedSample> make_corpus(std::int64_t n_images, std::int64_t size,
                                      const std::vector<DegradationSpec>& specs, std::uint64_t seed,
                                      int workers = 1);

// Writes <root>/degraded/<id>.png, <root>/clean/<id>.png and manifest.json.
void save_corpus(const std::string& root, const std::vector<PairedSample>& samples, const std::string& manifest_json);

// Pairs files by stem, sorted. Stems present on one side only raise an
// IngestionError listing every orphan.
std::vector<PairedSample> load_paired_folder(const std::string& degraded_dir, const std::string& clean_dir,
                                             int workers = 1);
std::vector<PairedSample> load_corpus(const std::string& root, int workers = 1);

struct PatchOffset {
  std::size_t image = 0;
  std::int64_t top = 0;
  std::int64_t left = 0;
};

struct PatchBatch {
  Tensor<float> degraded;  // (batch, 3, patch, patch)
  Tensor<float> clean;
  std::vector<PatchOffset> offsets;
};

// Random aligned crops. Batch `step` depends only on (seed, step), so a
// resumed run sees the same stream.
class PatchSampler {
 public:
  PatchSampler(const std::vector<PairedSample>& pairs, std::int64_t patch, std::int64_t batch, std::uint64_t seed);
  [[nodiscard]] PatchBatch batch(std::int64_t step) const;

 private:
  const std::vector<PairedSample>* pairs_;
  std::int64_t patch_;
  std::int64_t batch_;
  std::uint64_t seed_;
};

}  // namespace swformer
