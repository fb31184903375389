#include "swformer/objective.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "swformer/network.hpp"
#include "swformer/ops.hpp"
#include "swformer/transforms.hpp"

namespace swformer {

void LossConfig::validate() const {
  if (!(lambda_fourier >= 0)) throw ConfigError("loss.lambda_fourier must be >= 0");
  if (!(wavelet_weight >= 0)) throw ConfigError("loss.wavelet_weight must be >= 0");
  for (double w : scale_weights) {
    if (!(w >= 0)) throw ConfigError("loss.scale_weights must be >= 0");
  }
}

std::vector<std::string> LossConfig::flat_keys() {
  return {"loss.lambda_fourier", "loss.wavelet_weight", "loss.scale_weights"};
}

FlatConfig LossConfig::to_flat() const {
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  FlatConfig f;
  f.set("loss.lambda_fourier", num(lambda_fourier));
  f.set("loss.wavelet_weight", num(wavelet_weight));
  f.set("loss.scale_weights", num(scale_weights[0]) + "," + num(scale_weights[1]) + "," + num(scale_weights[2]));
  return f;
}

LossConfig LossConfig::from_flat(const FlatConfig& cfg) {
  LossConfig l;
  l.lambda_fourier = cfg.get_double("loss.lambda_fourier", l.lambda_fourier);
  l.wavelet_weight = cfg.get_double("loss.wavelet_weight", l.wavelet_weight);
  if (cfg.has("loss.scale_weights")) {
    const auto w = cfg.get_doubles("loss.scale_weights", {});
    if (w.size() != 3) throw ConfigError("loss.scale_weights needs 3 entries");
    std::copy(w.begin(), w.end(), l.scale_weights.begin());
  }
  l.validate();
  return l;
}

template <typename T>
LossTerms<T> domain_loss(const Tensor<T>& output, const Tensor<T>& target, const LossConfig& cfg) {
  if (!(output.shape() == target.shape())) {
    throw DimensionError("loss: output " + output.shape().str() + " and target " + target.shape().str() +
                         " differ");
  }
  auto diff = sub(output, target);
  LossTerms<T> t;
  t.spatial = mean(abs(diff));
  t.wavelet = mean(abs(dwt2_packed(diff, fixed_haar<T>().analysis, OddSizePolicy::kReflect)));
  t.fourier = mean(abs(fft2_packed(diff)));
  t.total = add(add(t.spatial, scale(t.wavelet, T(cfg.wavelet_weight))), scale(t.fourier, T(cfg.lambda_fourier)));
  return t;
}

template <typename T>
LossTerms<T> multi_domain_loss(const std::array<std::optional<Tensor<T>>, 3>& outputs,
                               const std::array<std::optional<Tensor<T>>, 3>& targets, const LossConfig& cfg) {
  LossTerms<T> sum_terms;
  bool any = false;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!outputs[k]) continue;
    if (!targets[k]) throw UsageError("loss: output at level " + std::to_string(k) + " has no target");
    auto t = domain_loss(*outputs[k], *targets[k], cfg);
    const T w = T(cfg.scale_weights[k]);
    auto weighted = w == T(1) ? t.total : scale(t.total, w);
    if (!any) {
      sum_terms = LossTerms<T>{weighted, t.spatial, t.wavelet, t.fourier};
      any = true;
    } else {
      sum_terms.total = add(sum_terms.total, weighted);
      sum_terms.spatial = add(sum_terms.spatial, t.spatial);
      sum_terms.wavelet = add(sum_terms.wavelet, t.wavelet);
      sum_terms.fourier = add(sum_terms.fourier, t.fourier);
    }
  }
  if (!any) throw UsageError("loss: no outputs to supervise");
  return sum_terms;
}

double psnr(const Tensor<float>& x, const Tensor<float>& y, double max_val) {
  if (!(x.shape() == y.shape())) {
    throw DimensionError("psnr: shapes " + x.shape().str() + " and " + y.shape().str() + " differ");
  }
  const auto a = x.data();
  const auto b = y.data();
  double se = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    se += d * d;
  }
  if (se == 0) return std::numeric_limits<double>::infinity();
  const double mse = se / static_cast<double>(a.size());
  return 20.0 * std::log10(max_val / std::sqrt(mse));
}

double ssim(const Tensor<float>& x, const Tensor<float>& y) {
  if (!(x.shape() == y.shape())) {
    throw DimensionError("ssim: shapes " + x.shape().str() + " and " + y.shape().str() + " differ");
  }
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  const Shape s = x.shape();
  if (s.h < kWin || s.w < kWin) {
    throw UsageError("ssim: image " + s.str() + " is smaller than the 11x11 window");
  }
  std::array<double, kWin> g{};
  double gs = 0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - kWin / 2;
    g[i] = std::exp(-d * d / (2 * kSigma * kSigma));
    gs += g[i];
  }
  for (auto& v : g) v /= gs;
  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;

  const std::int64_t oh = s.h - kWin + 1;
  const std::int64_t ow = s.w - kWin + 1;
  const auto xa = x.data();
  const auto ya = y.data();
  // Separable filtering of x, y, x^2, y^2, xy: rows first, then columns.
  std::vector<double> rows(5 * s.h * ow);
  double total = 0;
  for (std::int64_t p = 0; p < s.n * s.c; ++p) {
    const float* px = xa.data() + p * s.plane();
    const float* py = ya.data() + p * s.plane();
    for (std::int64_t r = 0; r < s.h; ++r) {
      for (std::int64_t c = 0; c < ow; ++c) {
        double m[5] = {0, 0, 0, 0, 0};
        for (int k = 0; k < kWin; ++k) {
          const double a = px[r * s.w + c + k];
          const double b = py[r * s.w + c + k];
          m[0] += g[k] * a;
          m[1] += g[k] * b;
          m[2] += g[k] * a * a;
          m[3] += g[k] * b * b;
          m[4] += g[k] * a * b;
        }
        for (int q = 0; q < 5; ++q) rows[(q * s.h + r) * ow + c] = m[q];
      }
    }
    double plane_sum = 0;
    for (std::int64_t r = 0; r < oh; ++r) {
      for (std::int64_t c = 0; c < ow; ++c) {
        double m[5] = {0, 0, 0, 0, 0};
        for (int k = 0; k < kWin; ++k) {
          for (int q = 0; q < 5; ++q) m[q] += g[k] * rows[(q * s.h + r + k) * ow + c];
        }
        const double vx = m[2] - m[0] * m[0];
        const double vy = m[3] - m[1] * m[1];
        const double cov = m[4] - m[0] * m[1];
        plane_sum += ((2 * m[0] * m[1] + c1) * (2 * cov + c2)) /
                     ((m[0] * m[0] + m[1] * m[1] + c1) * (vx + vy + c2));
      }
    }
    total += plane_sum / static_cast<double>(oh * ow);
  }
  return total / static_cast<double>(s.n * s.c);
}

Tensor<float> to_y_channel(const Tensor<float>& rgb, LumaRange range) {
  const Shape s = rgb.shape();
  if (s.c != 3) throw DimensionError("to_y_channel: expected 3 channels, got " + s.str());
  double kr = 0.299;
  double kg = 0.587;
  double kb = 0.114;
  double offset = 0;
  if (range == LumaRange::kStudio) {
    kr = 65.481 / 255.0;
    kg = 128.553 / 255.0;
    kb = 24.966 / 255.0;
    offset = 16.0 / 255.0;
  }
  auto out = Tensor<float>::zeros(Shape{s.n, 1, s.h, s.w});
  const auto in = rgb.data();
  auto o = out.data();
  const std::int64_t hw = s.plane();
  for (std::int64_t n = 0; n < s.n; ++n) {
    const float* r = in.data() + n * 3 * hw;
    for (std::int64_t i = 0; i < hw; ++i) {
      o[n * hw + i] = static_cast<float>(offset + kr * r[i] + kg * r[hw + i] + kb * r[2 * hw + i]);
    }
  }
  return out;
}

void MetricReport::add(ImageMetric m) {
  images.push_back(std::move(m));
  double ps = 0;
  double ss = 0;
  for (const auto& im : images) {
    ps += im.psnr_db;
    ss += im.ssim;
  }
  mean_psnr = ps / static_cast<double>(images.size());
  mean_ssim = ss / static_cast<double>(images.size());
}

std::string MetricReport::to_jsonl() const {
  using nlohmann::json;
  auto db = [](double v) { return std::isinf(v) ? json("inf") : json(v); };
  std::string out;
  for (const auto& im : images) {
    json j = {{"path", im.id}, {"psnr", db(im.psnr_db)}, {"ssim", im.ssim}, {"y_channel", y_channel}};
    out += j.dump() + "\n";
  }
  json summary = {{"summary", true},
                  {"count", images.size()},
                  {"mean_psnr", db(mean_psnr)},
                  {"mean_ssim", mean_ssim},
                  {"y_channel", y_channel}};
  out += summary.dump() + "\n";
  return out;
}

ImageMetric evaluate_pair(const std::string& id, const Tensor<float>& restored, const Tensor<float>& reference,
                          bool y_channel, LumaRange range) {
  ImageMetric m;
  m.id = id;
  if (y_channel) {
    const auto a = to_y_channel(restored, range);
    const auto b = to_y_channel(reference, range);
    m.psnr_db = psnr(a, b);
    m.ssim = ssim(a, b);
  } else {
    m.psnr_db = psnr(restored, reference);
    m.ssim = ssim(restored, reference);
  }
  return m;
}

#define SWFORMER_INSTANTIATE_OBJECTIVE(T)                                                     \
  template LossTerms<T> domain_loss<T>(const Tensor<T>&, const Tensor<T>&, const LossConfig&); \
  template LossTerms<T> multi_domain_loss<T>(const std::array<std::optional<Tensor<T>>, 3>&,   \
                                             const std::array<std::optional<Tensor<T>>, 3>&, const LossConfig&);

SWFORMER_INSTANTIATE_OBJECTIVE(float)
SWFORMER_INSTANTIATE_OBJECTIVE(double)

}  // namespace swformer
