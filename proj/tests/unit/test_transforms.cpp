#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "swformer/fft.hpp"
#include "swformer/grad_check.hpp"
#include "swformer/ops.hpp"
#include "swformer/transforms.hpp"

namespace swformer {
namespace {

using testing::max_abs_diff;
using testing::random_tensor;

TEST(Fft, ConstantHasOnlyDc) {
  auto spec = fft2(Tensor<double>::ones(Shape{1, 1, 4, 4}));
  EXPECT_NEAR(spec.real.at(0, 0, 0, 0), 4.0, 1e-12);
  for (std::int64_t i = 1; i < 16; ++i) EXPECT_NEAR(spec.real.data()[i], 0.0, 1e-12);
  for (double v : spec.imag.data()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Fft, MatchesBruteForceDft) {
  for (auto [h, w] : {std::pair<std::int64_t, std::int64_t>{4, 8}, {5, 3}, {6, 6}, {1, 7}}) {
    auto x = random_tensor(Shape{2, 2, h, w}, std::uint64_t(h * 10 + w));
    auto packed = fft2_packed(x);
    for (std::int64_t n = 0; n < 2; ++n)
      for (std::int64_t c = 0; c < 2; ++c) {
        std::vector<std::complex<double>> plane(h * w);
        for (std::int64_t i = 0; i < h * w; ++i) plane[i] = x.at(n, c, i / w, i % w);
        const auto want = testing::brute_dft2(plane, h, w);
        for (std::int64_t i = 0; i < h * w; ++i) {
          EXPECT_NEAR(packed.at(n, c, i / w, i % w), want[i].real(), 1e-12);
          EXPECT_NEAR(packed.at(n, c + 2, i / w, i % w), want[i].imag(), 1e-12);
        }
      }
  }
}

TEST(Fft, OneDimensionalMatchesDefinition) {
  for (std::int64_t n : {1, 2, 3, 8, 12, 16}) {
    std::vector<std::complex<double>> x(n);
    Rng rng{std::uint64_t(n)};
    for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    auto y = x;
    fft::dft(y, false);
    const auto want = testing::brute_dft2(x, 1, n);
    for (std::int64_t k = 0; k < n; ++k) EXPECT_LT(std::abs(y[k] - want[k] * std::sqrt(double(n))), 1e-10);
  }
}

TEST(Fft, RoundTripAndParseval) {
  auto x = random_tensor(Shape{2, 3, 8, 12}, 3);
  EXPECT_LT(max_abs_diff(ifft2_packed(fft2_packed(x)), x), 1e-12);
  EXPECT_NEAR(testing::sum_sq(fft2_packed(x)), testing::sum_sq(x), 1e-10);
  EXPECT_LT(ifft2_imag_residue(fft2(x)), 1e-12);
}

TEST(Fft, GradientsMatchFiniteDifferences) {
  auto x = random_tensor(Shape{1, 2, 4, 6}, 4).set_requires_grad(true);
  auto w = random_tensor(Shape{1, 4, 4, 6}, 5);
  auto r = grad_check([&] { return sum(mul(abs(add_scalar(fft2_packed(x), 0.3)), w)); }, {{"x", x}}, 1e-3);
  EXPECT_TRUE(r.passed) << r.summary();
  auto s = random_tensor(Shape{1, 4, 4, 6}, 6).set_requires_grad(true);
  auto r2 = grad_check([&] { return sum(mul(ifft2_packed(s), ifft2_packed(s))); }, {{"s", s}}, 1e-3);
  EXPECT_TRUE(r2.passed) << r2.summary();
}

TEST(Dwt, ConstantCell) {
  const auto bank = WaveletFilterBank<double>::haar(false);
  auto b = dwt2(Tensor<double>::full(Shape{1, 1, 2, 2}, 0.7), bank);
  EXPECT_NEAR(b.ll.item(), 1.4, 1e-15);
  EXPECT_NEAR(b.lh.item(), 0.0, 1e-15);
  EXPECT_NEAR(b.hl.item(), 0.0, 1e-15);
  EXPECT_NEAR(b.hh.item(), 0.0, 1e-15);
}

TEST(Dwt, MatchesFilterAndDownsample) {
  const auto bank = WaveletFilterBank<double>::haar(false);
  auto cell = Tensor<double>::from_data(Shape{1, 1, 2, 2}, {1, 2, 3, 4});
  auto b = dwt2(cell, bank);
  const auto want = testing::haar_cell(1, 2, 3, 4);
  for (Band band : kAllBands) EXPECT_NEAR(b[band].item(), want[int(band)], 1e-15) << band_name(band);

  auto x = random_tensor(Shape{2, 3, 6, 8}, 7);
  auto packed = dwt2_packed(x, bank.analysis);
  ASSERT_EQ(packed.shape(), (Shape{2, 12, 3, 4}));
  for (std::int64_t n = 0; n < 2; ++n)
    for (std::int64_t c = 0; c < 3; ++c)
      for (std::int64_t y = 0; y < 3; ++y)
        for (std::int64_t xx = 0; xx < 4; ++xx) {
          const auto v = testing::haar_cell(x.at(n, c, 2 * y, 2 * xx), x.at(n, c, 2 * y, 2 * xx + 1),
                                            x.at(n, c, 2 * y + 1, 2 * xx), x.at(n, c, 2 * y + 1, 2 * xx + 1));
          for (int k = 0; k < 4; ++k) EXPECT_NEAR(packed.at(n, k * 3 + c, y, xx), v[k], 1e-14);
        }
}

TEST(Dwt, PerfectReconstructionAndEnergy) {
  const auto bank = WaveletFilterBank<double>::haar(false);
  auto x = random_tensor(Shape{1, 3, 8, 8}, 8);
  auto packed = dwt2_packed(x, bank.analysis);
  EXPECT_LT(max_abs_diff(idwt2_packed(packed, bank.synthesis), x), 1e-12);
  EXPECT_NEAR(testing::sum_sq(packed), testing::sum_sq(x), 1e-10);
  auto parts = SubBands<double>::unpack(packed);
  EXPECT_EQ(max_abs_diff(parts.packed(), packed), 0.0);
}

TEST(Dwt, OddSizes) {
  const auto bank = WaveletFilterBank<double>::haar(false);
  auto x = random_tensor(Shape{1, 2, 7, 5}, 9);
  EXPECT_THROW((void)dwt2_packed(x, bank.analysis, OddSizePolicy::kReject), DimensionError);
  auto packed = dwt2_packed(x, bank.analysis, OddSizePolicy::kReflect);
  EXPECT_EQ(packed.shape(), (Shape{1, 8, 4, 3}));
  EXPECT_LT(max_abs_diff(idwt2_packed(packed, bank.synthesis, 7, 5), x), 1e-12);
}

TEST(Dwt, VerticalRampHasNoDiagonalDetail) {
  auto x = Tensor<double>::zeros(Shape{1, 1, 8, 8});
  for (std::int64_t y = 0; y < 8; ++y)
    for (std::int64_t c = 0; c < 8; ++c) x.at(0, 0, y, c) = 0.1 * double(y);
  auto b = dwt2(x, WaveletFilterBank<double>::haar(false));
  for (double v : b.hh.data()) EXPECT_NEAR(v, 0.0, 1e-15);
  for (double v : b.hl.data()) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Dwt, LearnableFiltersGetGradients) {
  auto bank = WaveletFilterBank<double>::haar(true);
  bank.analysis.set_requires_grad(true);
  bank.synthesis.set_requires_grad(true);
  auto x = random_tensor(Shape{1, 2, 4, 4}, 10).set_requires_grad(true);
  auto w = random_tensor(Shape{1, 2, 4, 4}, 11);
  auto f = [&] {
    auto b = dwt2_packed(x, bank.analysis);
    return sum(mul(idwt2_packed(gelu(b), bank.synthesis), w));
  };
  auto r = grad_check(f, {{"x", x}, {"analysis", bank.analysis}, {"synthesis", bank.synthesis}}, 1e-3);
  EXPECT_TRUE(r.passed) << r.summary();
}

TEST(Shuffle, Definitional) {
  auto x = Tensor<double>::from_data(Shape{1, 1, 2, 2}, {1, 2, 3, 4});
  auto u = pixel_unshuffle(x);
  ASSERT_EQ(u.shape(), (Shape{1, 4, 1, 1}));
  for (int i = 0; i < 4; ++i) EXPECT_EQ(u.data()[i], double(i + 1));
}

TEST(Shuffle, RoundTripAndMultiset) {
  auto x = random_tensor(Shape{2, 3, 8, 4}, 12);
  auto u = pixel_unshuffle(x);
  EXPECT_EQ(u.shape(), (Shape{2, 12, 4, 2}));
  EXPECT_EQ(max_abs_diff(pixel_shuffle(u), x), 0.0);
  std::vector<double> a(x.data().begin(), x.data().end());
  std::vector<double> b(u.data().begin(), u.data().end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
  EXPECT_THROW((void)pixel_unshuffle(random_tensor(Shape{1, 1, 3, 4}, 1)), DimensionError);
}

}  // namespace
}  // namespace swformer
