#include "swformer/data.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "swformer/image_io.hpp"
#include "swformer/rng.hpp"

namespace swformer {

namespace fs = std::filesystem;

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads; the first exception
// is rethrown once all threads have joined.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(n, 1));
  if (k == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < k; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += k) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Sum of a few random low-frequency plane waves, rescaled to [0, 1].
std::vector<double> smooth_field(std::int64_t h, std::int64_t w, Rng& rng, int waves = 4) {
  std::vector<double> f(static_cast<std::size_t>(h * w), 0.0);
  for (int k = 0; k < waves; ++k) {
    const double fx = rng.uniform(-3.0, 3.0);
    const double fy = rng.uniform(-3.0, 3.0);
    const double phase = rng.uniform(0.0, 2 * std::numbers::pi);
    const double amp = rng.uniform(0.3, 1.0);
    for (std::int64_t y = 0; y < h; ++y) {
      for (std::int64_t x = 0; x < w; ++x) {
        f[y * w + x] += amp * std::sin(2 * std::numbers::pi * (fx * x / w + fy * y / h) + phase);
      }
    }
  }
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  const double a = *lo;
  const double span = *hi - *lo;
  for (auto& v : f) v = span > 0 ? (v - a) / span : 0.5;
  return f;
}

constexpr std::uint8_t kDigits[10][7] = {
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}, {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}, {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}, {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}, {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}, {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},
};

void clamp01(Tensor<float>& t) {
  for (auto& v : t.data()) v = std::clamp(v, 0.0f, 1.0f);
}

void check_image(const Tensor<float>& img, const char* what) {
  const Shape s = img.shape();
  if (s.n != 1 || s.c != 3) throw DimensionError(std::string(what) + ": expected (1, 3, H, W), got " + s.str());
}

Tensor<float> rain(const Tensor<float>& clean, const DegradationSpec& d, Rng& rng) {
  const Shape s = clean.shape();
  std::vector<float> streaks(static_cast<std::size_t>(s.plane()), 0.0f);
  for (std::int64_t k = 0; k < d.streak_count; ++k) {
    const double angle = (d.streak_angle_deg + d.angle_jitter_deg * rng.uniform(-1.0, 1.0)) * std::numbers::pi / 180;
    const double length = d.streak_length * rng.uniform(0.5, 1.5);
    const double strength = d.streak_intensity * rng.uniform(0.6, 1.0);
    const double x0 = rng.uniform(0.0, static_cast<double>(s.w));
    const double y0 = rng.uniform(-length, static_cast<double>(s.h));
    const double dx = std::cos(angle);
    const double dy = std::sin(angle);
    const auto n_steps = static_cast<std::int64_t>(std::ceil(2 * length));
    for (std::int64_t i = 0; i <= n_steps; ++i) {
      const double t = 0.5 * static_cast<double>(i);
      const auto x = static_cast<std::int64_t>(std::floor(x0 + t * dx));
      const auto y = static_cast<std::int64_t>(std::floor(y0 + t * dy));
      if (x < 0 || y < 0 || x >= s.w || y >= s.h) continue;
      auto& v = streaks[y * s.w + x];
      v = std::max(v, static_cast<float>(strength));
    }
  }
  auto out = clean.detach();
  auto o = out.data();
  for (std::int64_t c = 0; c < 3; ++c) {
    for (std::int64_t i = 0; i < s.plane(); ++i) o[c * s.plane() + i] += streaks[i];
  }
  return out;
}

Tensor<float> haze(const Tensor<float>& clean, const DegradationSpec& d, Rng& rng) {
  const Shape s = clean.shape();
  const auto field = smooth_field(s.h, s.w, rng, 2);
  auto out = clean.detach();
  auto o = out.data();
  for (std::int64_t c = 0; c < 3; ++c) {
    for (std::int64_t i = 0; i < s.plane(); ++i) {
      const double t = d.t_min + (d.t_max - d.t_min) * field[i];
      auto& v = o[c * s.plane() + i];
      v = static_cast<float>(static_cast<double>(v) * t + d.airlight * (1 - t));
    }
  }
  return out;
}

Tensor<float> blur(const Tensor<float>& clean, double sigma) {
  if (sigma == 0) return clean.detach();
  const auto g = gaussian_kernel(sigma);
  const auto r = static_cast<std::int64_t>(g.size() / 2);
  const Shape s = clean.shape();
  const auto in = clean.data();
  std::vector<double> tmp(in.size());
  auto out = Tensor<float>::zeros(s);
  auto o = out.data();
  auto clampi = [](std::int64_t v, std::int64_t n) { return std::clamp<std::int64_t>(v, 0, n - 1); };
  for (std::int64_t c = 0; c < s.n * s.c; ++c) {
    const std::int64_t base = c * s.plane();
    for (std::int64_t y = 0; y < s.h; ++y) {
      for (std::int64_t x = 0; x < s.w; ++x) {
        double acc = 0;
        for (std::int64_t k = -r; k <= r; ++k) acc += g[k + r] * in[base + y * s.w + clampi(x + k, s.w)];
        tmp[base + y * s.w + x] = acc;
      }
    }
    for (std::int64_t y = 0; y < s.h; ++y) {
      for (std::int64_t x = 0; x < s.w; ++x) {
        double acc = 0;
        for (std::int64_t k = -r; k <= r; ++k) acc += g[k + r] * tmp[base + clampi(y + k, s.h) * s.w + x];
        o[base + y * s.w + x] = static_cast<float>(acc);
      }
    }
  }
  return out;
}

Tensor<float> low_light(const Tensor<float>& clean, const DegradationSpec& d, Rng& rng) {
  auto out = clean.detach();
  for (auto& v : out.data()) {
    double y = d.gain * std::pow(static_cast<double>(v), d.gamma);
    if (d.noise_sigma > 0) y += d.noise_sigma * rng.normal();
    v = static_cast<float>(y);
  }
  return out;
}

std::map<std::string, fs::path> list_pngs(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError(dir + ": not a directory");
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (ext == ".png") out[entry.path().stem().string()] = entry.path();
  }
  return out;
}

}  // namespace

const char* degradation_name(DegradationKind k) {
  switch (k) {
    case DegradationKind::kRainStreaks:
      return "rain_streaks";
    case DegradationKind::kHaze:
      return "haze";
    case DegradationKind::kGaussianBlur:
      return "gaussian_blur";
    case DegradationKind::kLowLight:
      return "low_light";
  }
  return "?";
}

DegradationKind parse_degradation(const std::string& text) {
  if (text == "rain_streaks" || text == "rain") return DegradationKind::kRainStreaks;
  if (text == "haze") return DegradationKind::kHaze;
  if (text == "gaussian_blur" || text == "blur") return DegradationKind::kGaussianBlur;
  if (text == "low_light") return DegradationKind::kLowLight;
  throw ConfigError("unknown degradation '" + text + "' (expected rain_streaks, haze, gaussian_blur or low_light)");
}

void DegradationSpec::validate() const {
  switch (kind) {
    case DegradationKind::kRainStreaks:
      if (streak_count < 0) throw ConfigError("rain: streak_count must be >= 0");
      if (!(streak_length > 0)) throw ConfigError("rain: streak_length must be > 0");
      if (!(streak_intensity >= 0 && streak_intensity <= 1)) throw ConfigError("rain: streak_intensity must be in [0, 1]");
      if (!(angle_jitter_deg >= 0)) throw ConfigError("rain: angle_jitter_deg must be >= 0");
      break;
    case DegradationKind::kHaze:
      if (!(t_min > 0 && t_min <= 1) || !(t_max > 0 && t_max <= 1)) {
        throw ConfigError("haze: transmission must lie in (0, 1], got [" + num(t_min) + ", " + num(t_max) + "]");
      }
      if (t_min > t_max) throw ConfigError("haze: t_min exceeds t_max");
      if (!(airlight >= 0 && airlight <= 1)) throw ConfigError("haze: airlight must be in [0, 1]");
      break;
    case DegradationKind::kGaussianBlur:
      if (!(blur_sigma >= 0)) throw ConfigError("gaussian_blur: sigma must be >= 0, got " + num(blur_sigma));
      break;
    case DegradationKind::kLowLight:
      if (!(gamma > 0)) throw ConfigError("low_light: gamma must be > 0");
      if (!(gain > 0 && gain <= 1)) throw ConfigError("low_light: gain must be in (0, 1]");
      if (!(noise_sigma >= 0)) throw ConfigError("low_light: noise_sigma must be >= 0");
      break;
  }
}

std::vector<std::string> DegradationSpec::flat_keys(const std::string& prefix) {
  std::vector<std::string> keys;
  for (const char* k : {"kind", "streak_count", "streak_angle_deg", "angle_jitter_deg", "streak_length",
                        "streak_intensity", "t_min", "t_max", "airlight", "blur_sigma", "gamma", "gain",
                        "noise_sigma"}) {
    keys.push_back(prefix + k);
  }
  return keys;
}

FlatConfig DegradationSpec::to_flat(const std::string& prefix) const {
  FlatConfig f;
  f.set(prefix + "kind", degradation_name(kind));
  f.set(prefix + "streak_count", std::to_string(streak_count));
  f.set(prefix + "streak_angle_deg", num(streak_angle_deg));
  f.set(prefix + "angle_jitter_deg", num(angle_jitter_deg));
  f.set(prefix + "streak_length", num(streak_length));
  f.set(prefix + "streak_intensity", num(streak_intensity));
  f.set(prefix + "t_min", num(t_min));
  f.set(prefix + "t_max", num(t_max));
  f.set(prefix + "airlight", num(airlight));
  f.set(prefix + "blur_sigma", num(blur_sigma));
  f.set(prefix + "gamma", num(gamma));
  f.set(prefix + "gain", num(gain));
  f.set(prefix + "noise_sigma", num(noise_sigma));
  return f;
}

DegradationSpec DegradationSpec::from_flat(const FlatConfig& cfg, const std::string& prefix) {
  DegradationSpec d;
  if (cfg.has(prefix + "kind")) d.kind = parse_degradation(cfg.get(prefix + "kind", ""));
  d.streak_count = cfg.get_int(prefix + "streak_count", d.streak_count);
  d.streak_angle_deg = cfg.get_double(prefix + "streak_angle_deg", d.streak_angle_deg);
  d.angle_jitter_deg = cfg.get_double(prefix + "angle_jitter_deg", d.angle_jitter_deg);
  d.streak_length = cfg.get_double(prefix + "streak_length", d.streak_length);
  d.streak_intensity = cfg.get_double(prefix + "streak_intensity", d.streak_intensity);
  d.t_min = cfg.get_double(prefix + "t_min", d.t_min);
  d.t_max = cfg.get_double(prefix + "t_max", d.t_max);
  d.airlight = cfg.get_double(prefix + "airlight", d.airlight);
  d.blur_sigma = cfg.get_double(prefix + "blur_sigma", d.blur_sigma);
  d.gamma = cfg.get_double(prefix + "gamma", d.gamma);
  d.gain = cfg.get_double(prefix + "gain", d.gain);
  d.noise_sigma = cfg.get_double(prefix + "noise_sigma", d.noise_sigma);
  d.validate();
  return d;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma >= 0)) throw ConfigError("gaussian kernel: sigma must be >= 0");
  if (sigma == 0) return {1.0};
  const auto r = static_cast<std::int64_t>(std::ceil(3 * sigma));
  std::vector<double> g(static_cast<std::size_t>(2 * r + 1));
  double total = 0;
  for (std::int64_t i = -r; i <= r; ++i) {
    g[i + r] = std::exp(-static_cast<double>(i * i) / (2 * sigma * sigma));
    total += g[i + r];
  }
  for (auto& v : g) v /= total;
  return g;
}

Tensor<float> make_clean(CleanKind kind, std::int64_t height, std::int64_t width, std::uint64_t seed) {
  Rng rng(seed);
  auto out = Tensor<float>::zeros(Shape{1, 3, height, width});
  auto o = out.data();
  const std::int64_t hw = height * width;
  auto color = [&] { return std::array<double, 3>{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)}; };
  switch (kind) {
    case CleanKind::kGradient: {
      const auto a = color();
      const auto b = color();
      const double theta = rng.uniform(0.0, 2 * std::numbers::pi);
      const double cx = std::cos(theta);
      const double cy = std::sin(theta);
      const double span = std::abs(cx) * (width - 1) + std::abs(cy) * (height - 1);
      const double offset = std::min(0.0, cx * (width - 1)) + std::min(0.0, cy * (height - 1));
      for (std::int64_t y = 0; y < height; ++y) {
        for (std::int64_t x = 0; x < width; ++x) {
          const double t = span > 0 ? (cx * x + cy * y - offset) / span : 0.0;
          for (int c = 0; c < 3; ++c) o[c * hw + y * width + x] = static_cast<float>(a[c] + (b[c] - a[c]) * t);
        }
      }
      break;
    }
    case CleanKind::kCheckerboard: {
      const auto a = color();
      const auto b = color();
      const auto cell = static_cast<std::int64_t>(4 + rng.below(13));
      const auto ox = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cell)));
      const auto oy = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cell)));
      for (std::int64_t y = 0; y < height; ++y) {
        for (std::int64_t x = 0; x < width; ++x) {
          const bool odd = (((x + ox) / cell) + ((y + oy) / cell)) % 2 != 0;
          for (int c = 0; c < 3; ++c) o[c * hw + y * width + x] = static_cast<float>(odd ? a[c] : b[c]);
        }
      }
      break;
    }
    case CleanKind::kSmoothField: {
      for (int c = 0; c < 3; ++c) {
        const auto f = smooth_field(height, width, rng);
        for (std::int64_t i = 0; i < hw; ++i) o[c * hw + i] = static_cast<float>(0.1 + 0.8 * f[i]);
      }
      break;
    }
    case CleanKind::kGlyphs: {
      const auto bg = color();
      const auto f = smooth_field(height, width, rng, 2);
      for (int c = 0; c < 3; ++c) {
        for (std::int64_t i = 0; i < hw; ++i) o[c * hw + i] = static_cast<float>(bg[c] * (0.7 + 0.3 * f[i]));
      }
      const std::int64_t glyphs = 3 + static_cast<std::int64_t>(rng.below(5));
      for (std::int64_t g = 0; g < glyphs; ++g) {
        const auto& rows = kDigits[rng.below(10)];
        const auto s = static_cast<std::int64_t>(1 + rng.below(3));
        const auto ink = color();
        const auto x0 = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(std::max<std::int64_t>(1, width - 5 * s))));
        const auto y0 = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(std::max<std::int64_t>(1, height - 7 * s))));
        for (std::int64_t r = 0; r < 7 * s; ++r) {
          for (std::int64_t q = 0; q < 5 * s; ++q) {
            if (((rows[r / s] >> (4 - q / s)) & 1) == 0) continue;
            const std::int64_t y = y0 + r;
            const std::int64_t x = x0 + q;
            if (y >= height || x >= width) continue;
            for (int c = 0; c < 3; ++c) o[c * hw + y * width + x] = static_cast<float>(ink[c]);
          }
        }
      }
      break;
    }
  }
  clamp01(out);
  return out;
}

PairedSample synth_pair(const Tensor<float>& clean, const DegradationSpec& spec, const std::string& id) {
  check_image(clean, "synth_pair");
  for (float v : clean.data()) {
    if (!(v >= 0.0f && v <= 1.0f)) throw ConfigError("synth_pair: clean image values must lie in [0, 1]");
  }
  spec.validate();
  Rng rng(spec.seed);
  PairedSample p;
  p.id = id;
  p.clean = clean.detach();
  switch (spec.kind) {
    case DegradationKind::kRainStreaks:
      p.degraded = rain(clean, spec, rng);
      break;
    case DegradationKind::kHaze:
      p.degraded = haze(clean, spec, rng);
      break;
    case DegradationKind::kGaussianBlur:
      p.degraded = blur(clean, spec.blur_sigma);
      break;
    case DegradationKind::kLowLight:
      p.degraded = low_light(clean, spec, rng);
      break;
  }
  clamp01(p.degraded);
  return p;
}

std::vector<PairedSample> make_corpus(std::int64_t n_images, std::int64_t size,
                                      const std::vector<DegradationSpec>& specs, std::uint64_t seed, int workers) {
  if (n_images < 0) throw ConfigError("corpus: n_images must be >= 0");
  if (size < 8) throw ConfigError("corpus: image size must be >= 8");
  if (specs.empty()) throw ConfigError("corpus: at least one degradation spec is required");
  for (const auto& s : specs) s.validate();
  std::vector<PairedSample> out(static_cast<std::size_t>(n_images));
  parallel_for(out.size(), workers, [&](std::size_t i) {
    Rng r = Rng::derive(seed, i);
    const std::uint64_t clean_seed = r.next_u64();
    DegradationSpec spec = specs[i % specs.size()];
    spec.seed = r.next_u64();
    const auto clean = make_clean(static_cast<CleanKind>(i % 4), size, size, clean_seed);
    char id[32];
    std::snprintf(id, sizeof id, "img_%04zu", i);
    out[i] = synth_pair(clean, spec, id);
  });
  return out;
}

void save_corpus(const std::string& root, const std::vector<PairedSample>& samples, const std::string& manifest_json) {
  const fs::path base(root);
  std::error_code ec;
  fs::create_directories(base / "degraded", ec);
  fs::create_directories(base / "clean", ec);
  if (ec) throw IoError(root + ": cannot create corpus directories: " + ec.message());
  for (const auto& s : samples) {
    write_png((base / "degraded" / (s.id + ".png")).string(), s.degraded);
    write_png((base / "clean" / (s.id + ".png")).string(), s.clean);
  }
  const fs::path manifest = base / "manifest.json";
  const fs::path tmp = base / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError(manifest.string() + ": cannot open for writing");
    out << manifest_json;
    if (!out) throw IoError(manifest.string() + ": write failed");
  }
  fs::rename(tmp, manifest, ec);
  if (ec) throw IoError(manifest.string() + ": rename failed: " + ec.message());
}

std::vector<PairedSample> load_paired_folder(const std::string& degraded_dir, const std::string& clean_dir,
                                             int workers) {
  const auto a = list_pngs(degraded_dir);
  const auto b = list_pngs(clean_dir);
  std::vector<std::string> orphans;
  for (const auto& [stem, path] : a) {
    if (b.count(stem) == 0) orphans.push_back(path.string() + " (no clean counterpart)");
  }
  for (const auto& [stem, path] : b) {
    if (a.count(stem) == 0) orphans.push_back(path.string() + " (no degraded counterpart)");
  }
  if (!orphans.empty()) {
    std::string msg = "unmatched files:";
    for (const auto& o : orphans) msg += " " + o + ";";
    throw IngestionError(msg);
  }
  std::vector<std::string> stems;
  for (const auto& [stem, path] : a) stems.push_back(stem);
  std::vector<PairedSample> out(stems.size());
  parallel_for(stems.size(), workers, [&](std::size_t i) {
    PairedSample p;
    p.id = stems[i];
    p.degraded = read_png(a.at(stems[i]).string());
    p.clean = read_png(b.at(stems[i]).string());
    if (!(p.degraded.shape() == p.clean.shape())) {
      throw DimensionError(stems[i] + ": degraded " + p.degraded.shape().str() + " and clean " +
                           p.clean.shape().str() + " differ");
    }
    out[i] = std::move(p);
  });
  return out;
}

std::vector<PairedSample> load_corpus(const std::string& root, int workers) {
  return load_paired_folder((fs::path(root) / "degraded").string(), (fs::path(root) / "clean").string(), workers);
}

PatchSampler::PatchSampler(const std::vector<PairedSample>& pairs, std::int64_t patch, std::int64_t batch,
                           std::uint64_t seed)
    : pairs_(&pairs), patch_(patch), batch_(batch), seed_(seed) {
  if (pairs.empty()) throw ConfigError("patch sampler: corpus is empty");
  if (patch < 1 || batch < 1) throw ConfigError("patch sampler: patch and batch must be >= 1");
  for (const auto& p : pairs) {
    const Shape s = p.clean.shape();
    if (patch > s.h || patch > s.w) {
      throw ConfigError("patch sampler: patch " + std::to_string(patch) + " exceeds image " + p.id + " " + s.str());
    }
  }
}

PatchBatch PatchSampler::batch(std::int64_t step) const {
  Rng rng = Rng::derive(seed_, static_cast<std::uint64_t>(step));
  PatchBatch b;
  const Shape bs{batch_, 3, patch_, patch_};
  b.degraded = Tensor<float>::zeros(bs);
  b.clean = Tensor<float>::zeros(bs);
  const std::int64_t plane = patch_ * patch_;
  for (std::int64_t k = 0; k < batch_; ++k) {
    PatchOffset off;
    off.image = static_cast<std::size_t>(rng.below(pairs_->size()));
    const auto& pair = (*pairs_)[off.image];
    const Shape s = pair.clean.shape();
    off.top = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(s.h - patch_ + 1)));
    off.left = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(s.w - patch_ + 1)));
    b.offsets.push_back(off);
    auto copy_patch = [&](const Tensor<float>& src, Tensor<float>& dst_t) {
      const auto in = src.data();
      auto dst = dst_t.data();
      for (std::int64_t c = 0; c < 3; ++c) {
        for (std::int64_t y = 0; y < patch_; ++y) {
          const float* row = in.data() + (c * s.h + off.top + y) * s.w + off.left;
          std::copy(row, row + patch_, dst.data() + (k * 3 + c) * plane + y * patch_);
        }
      }
    };
    copy_patch(pair.degraded, b.degraded);
    copy_patch(pair.clean, b.clean);
  }
  return b;
}

}  // namespace swformer
