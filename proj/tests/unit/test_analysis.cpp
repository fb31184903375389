#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "json.hpp"
#include "oracles.hpp"
#include "scratch.hpp"
#include "swformer/analysis.hpp"
#include "swformer/data.hpp"
#include "swformer/network.hpp"

namespace swformer {
namespace {

using testing::max_abs_diff;

Tensor<float> picture(std::uint64_t seed, std::int64_t size = 32) {
  return make_clean(static_cast<CleanKind>(seed % 4), size, size, seed);
}

Tensor<float> plus(const Tensor<float>& x, const std::function<double(std::int64_t, std::int64_t)>& f) {
  auto out = x.detach();
  const Shape s = x.shape();
  for (std::int64_t c = 0; c < s.c; ++c)
    for (std::int64_t y = 0; y < s.h; ++y)
      for (std::int64_t xx = 0; xx < s.w; ++xx) out.at(0, c, y, xx) += float(f(y, xx));
  return out;
}

TEST(Spectral, ZeroResidualConvention) {
  auto c = picture(1);
  auto r = analyze_pair(c, c);
  EXPECT_EQ(r.residual_energy, 0.0);
  for (double f : r.energy_fractions) EXPECT_EQ(f, 0.25);
  for (float v : r.spectrum.data()) EXPECT_EQ(v, 0.0f);
  for (const auto& b : r.band_spectra)
    for (float v : b.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Spectral, SinusoidLandsInItsBinPair) {
  const std::int64_t n = 32;
  const std::int64_t k = 5;
  auto c = picture(2, n);
  auto d = plus(c, [&](std::int64_t, std::int64_t x) { return 0.05 * std::sin(2 * std::numbers::pi * k * x / n); });
  auto r = analyze_pair(c, d);
  // shifted bins (n/2, n/2 +- k); |F| = A sqrt(HW) / 2 for an orthonormal transform
  double peak = 0, total = 0;
  for (std::int64_t y = 0; y < n; ++y)
    for (std::int64_t x = 0; x < n; ++x) {
      const double mag = std::expm1(double(r.spectrum.at(0, 0, y, x)));
      total += mag * mag;
      if (y == n / 2 && (x == n / 2 + k || x == n / 2 - k)) {
        peak += mag * mag;
        EXPECT_NEAR(mag, 0.05 * n / 2, 1e-4);
      }
    }
  EXPECT_GT(peak / total, 0.999);
}

TEST(Spectral, ConstantOffsetLivesInLL) {
  auto c = picture(3);
  auto r = analyze_pair(c, plus(c, [](std::int64_t, std::int64_t) { return 0.1; }));
  EXPECT_GT(r.energy_fractions[int(Band::kLL)], 0.99);
}

TEST(Spectral, EnergyAccounting) {
  for (std::uint64_t s = 0; s < 4; ++s) {
    auto c = picture(s);
    auto d = make_corpus(1, 32, {DegradationSpec{}}, s)[0].degraded;
    auto r = analyze_pair(c, d);
    double bands = 0;
    for (double e : r.band_energy) bands += e;
    EXPECT_NEAR(bands, r.residual_energy, 1e-4);
    EXPECT_NEAR(r.residual_energy, testing::sum_sq(r.residual), 1e-4 * std::max(1.0, r.residual_energy));
    double fsum = 0;
    for (double f : r.energy_fractions) fsum += f;
    EXPECT_NEAR(fsum, 1.0, 1e-9);
  }
  EXPECT_THROW((void)analyze_pair(picture(1, 16), picture(1, 32)), DimensionError);
}

TEST(Spectral, FftShiftMovesDc) {
  auto x = Tensor<float>::zeros(Shape{1, 1, 4, 6});
  x.at(0, 0, 0, 0) = 1;
  auto y = fftshift(x);
  EXPECT_EQ(y.at(0, 0, 2, 3), 1.0f);
  auto odd = Tensor<float>::zeros(Shape{1, 1, 5, 5});
  odd.at(0, 0, 0, 0) = 1;
  EXPECT_EQ(fftshift(odd).at(0, 0, 2, 2), 1.0f);
}

TEST(Swap, TotalExchangeInvolutionIdentity) {
  auto a = picture(4);
  auto b = picture(5);
  std::set<Band> all(kAllBands.begin(), kAllBands.end());
  auto t = swap_subbands(a, b, all);
  EXPECT_LT(max_abs_diff(t.a, b), 1e-5);
  EXPECT_LT(max_abs_diff(t.b, a), 1e-5);
  for (const std::set<Band>& bands : {std::set<Band>{Band::kLL}, std::set<Band>{Band::kHL, Band::kHH}, all}) {
    auto once = swap_subbands(a, b, bands);
    auto twice = swap_subbands(once.a, once.b, bands);
    EXPECT_LT(max_abs_diff(twice.a, a), 1e-5);
    EXPECT_LT(max_abs_diff(twice.b, b), 1e-5);
  }
  auto none = swap_subbands(a, b, {});
  EXPECT_EQ(max_abs_diff(none.a, a), 0.0);
  EXPECT_EQ(max_abs_diff(none.b, b), 0.0);
  EXPECT_FALSE(none.warnings.empty());
  EXPECT_THROW((void)swap_subbands(a, picture(5, 16), {Band::kLL}), DimensionError);
}

TEST(Swap, ConservesSubBands) {
  auto a = picture(6);
  auto b = picture(7);
  const auto& bank = fixed_haar<float>();
  auto ba = dwt2(a, bank);
  auto bb = dwt2(b, bank);
  auto s = swap_subbands(a, b, {Band::kLH});
  auto sa = dwt2(s.a, bank);
  auto sb = dwt2(s.b, bank);
  for (Band band : kAllBands) {
    const bool swapped = band == Band::kLH;
    EXPECT_LT(max_abs_diff(sa[band], swapped ? bb[band] : ba[band]), 1e-5) << band_name(band);
    EXPECT_LT(max_abs_diff(sb[band], swapped ? ba[band] : bb[band]), 1e-5) << band_name(band);
  }
}

TEST(Swap, BrightnessTravelsWithLL) {
  auto b = picture(8);
  auto a = b.detach();
  for (auto& v : a.data()) v *= 0.5f;
  auto s = swap_subbands(a, b, {Band::kLL});
  EXPECT_NEAR(testing::mean_of(s.a), testing::mean_of(b), 0.02 * testing::mean_of(b));
  EXPECT_NEAR(testing::mean_of(s.b), testing::mean_of(a), 0.02 * testing::mean_of(a));
}

TEST(Report, WritesPanelsAndEnergyTable) {
  testing::ScratchDir dir("analysis");
  auto c = picture(9);
  auto r = analyze_pair(c, make_corpus(1, 32, {DegradationSpec{}}, 9)[0].degraded);
  write_report(dir.str(), "x", r);
  for (const char* f : {"x_residual.png", "x_spectrum.png", "x_LL.png", "x_LH.png", "x_HL.png", "x_HH.png"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / f)) << f;
  }
  auto j = nlohmann::json::parse(r.energy_json("x"));
  double sum = 0;
  for (const char* band : {"LL", "LH", "HL", "HH"}) sum += j["bands"][band]["fraction"].get<double>();
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

}  // namespace
}  // namespace swformer
