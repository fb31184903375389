#include "swformer/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "swformer/image_io.hpp"
#include "swformer/network.hpp"
#include "swformer/objective.hpp"
#include "swformer/ops.hpp"

namespace swformer {

namespace {

Tensor<float> luma(const Tensor<float>& x) {
  if (x.shape().c == 1) return x;
  return to_y_channel(x);
}

double energy(const Tensor<float>& x) {
  double e = 0;
  for (float v : x.data()) e += static_cast<double>(v) * v;
  return e;
}

// Scales to [0, 1] by the maximum; signed inputs are centred on 0.5.
Tensor<float> for_display(const Tensor<float>& x, bool is_signed) {
  auto out = x.detach();
  float peak = 0;
  for (float v : out.data()) peak = std::max(peak, std::abs(v));
  for (auto& v : out.data()) {
    if (peak == 0) {
      v = is_signed ? 0.5f : 0.0f;
    } else {
      v = is_signed ? 0.5f + 0.5f * v / peak : v / peak;
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw IoError(path.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(path.string() + ": rename failed: " + ec.message());
}

}  // namespace

Tensor<float> fftshift(const Tensor<float>& x) {
  const Shape s = x.shape();
  auto out = Tensor<float>::zeros(s);
  const auto in = x.data();
  auto o = out.data();
  for (std::int64_t p = 0; p < s.n * s.c; ++p) {
    for (std::int64_t y = 0; y < s.h; ++y) {
      for (std::int64_t xx = 0; xx < s.w; ++xx) {
        const std::int64_t ty = (y + s.h / 2) % s.h;
        const std::int64_t tx = (xx + s.w / 2) % s.w;
        o[p * s.plane() + ty * s.w + tx] = in[p * s.plane() + y * s.w + xx];
      }
    }
  }
  return out;
}

Tensor<float> log_magnitude(const Tensor<float>& x) {
  NoGradGuard guard;
  const auto f = fft2(x);
  auto out = Tensor<float>::zeros(x.shape());
  const auto re = f.real.data();
  const auto im = f.imag.data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = static_cast<float>(std::log1p(std::hypot(static_cast<double>(re[i]), static_cast<double>(im[i]))));
  }
  return fftshift(out);
}

SpectralReport analyze_pair(const Tensor<float>& clean, const Tensor<float>& degraded) {
  if (!(clean.shape() == degraded.shape())) {
    throw DimensionError("analyze: clean " + clean.shape().str() + " and degraded " + degraded.shape().str() +
                         " differ");
  }
  NoGradGuard guard;
  SpectralReport r;
  r.residual = sub(luma(degraded), luma(clean));
  r.spectrum = log_magnitude(r.residual);
  const auto bands = dwt2(r.residual, fixed_haar<float>(), OddSizePolicy::kReflect);
  double total = 0;
  for (Band b : kAllBands) {
    const auto i = static_cast<std::size_t>(b);
    r.band_spectra[i] = log_magnitude(bands[b]);
    r.band_energy[i] = energy(bands[b]);
    total += r.band_energy[i];
  }
  r.residual_energy = energy(r.residual);
  for (std::size_t i = 0; i < 4; ++i) r.energy_fractions[i] = total > 0 ? r.band_energy[i] / total : 0.25;
  return r;
}

std::string SpectralReport::energy_json(const std::string& id) const {
  nlohmann::json bands = nlohmann::json::object();
  for (Band b : kAllBands) {
    const auto i = static_cast<std::size_t>(b);
    bands[band_name(b)] = {{"energy", band_energy[i]}, {"fraction", energy_fractions[i]}};
  }
  nlohmann::json j = {{"id", id}, {"residual_energy", residual_energy}, {"bands", bands}};
  return j.dump(2) + "\n";
}

SwapResult swap_subbands(const Tensor<float>& a, const Tensor<float>& b, const std::set<Band>& bands) {
  if (!(a.shape() == b.shape())) {
    throw DimensionError("swap: shapes " + a.shape().str() + " and " + b.shape().str() + " differ");
  }
  SwapResult out;
  if (bands.empty()) {
    out.warnings.push_back("empty band set; images returned unchanged");
    out.a = a.detach();
    out.b = b.detach();
    return out;
  }
  NoGradGuard guard;
  const auto& bank = fixed_haar<float>();
  auto ba = dwt2(a, bank, OddSizePolicy::kReflect);
  auto bb = dwt2(b, bank, OddSizePolicy::kReflect);
  for (Band band : bands) std::swap(ba[band], bb[band]);
  out.a = idwt2(ba, bank, a.shape().h, a.shape().w);
  out.b = idwt2(bb, bank, b.shape().h, b.shape().w);
  return out;
}

void write_report(const std::string& dir, const std::string& id, const SpectralReport& report) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir + ": cannot create directory: " + ec.message());
  const fs::path base(dir);
  write_png((base / (id + "_residual.png")).string(), for_display(report.residual, true));
  write_png((base / (id + "_spectrum.png")).string(), for_display(report.spectrum, false));
  for (Band b : kAllBands) {
    write_png((base / (id + "_" + band_name(b) + ".png")).string(),
              for_display(report.band_spectra[static_cast<std::size_t>(b)], false));
  }
  write_text(base / (id + "_energy.json"), report.energy_json(id));
}

}  // namespace swformer
