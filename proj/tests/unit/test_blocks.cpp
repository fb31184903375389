#include <gtest/gtest.h>

#include "oracles.hpp"
#include "swformer/blocks.hpp"
#include "swformer/grad_check.hpp"

namespace swformer {
namespace {

using testing::max_abs_diff;
using testing::random_tensor;

template <typename M>
void zero_all(M& m) {
  for (auto& p : m.named_parameters()) {
    auto t = p.tensor;
    fill(t, 0.0);
  }
}

TEST(SpatialBranch, ZeroAndIdentity) {
  Rng rng(1);
  SpatialBranch<double> br(3, false, rng);
  zero_all(br);
  for (double v : br.forward(random_tensor(Shape{1, 3, 4, 4}, 2)).data()) EXPECT_EQ(v, 0.0);
  for (std::int64_t c = 0; c < 3; ++c) br.dw->weight.at(c, 0, 1, 1) = 1;
  auto x = random_tensor(Shape{1, 3, 4, 4}, 3);
  EXPECT_EQ(max_abs_diff(br.forward(x), gelu(x)), 0.0);
}

TEST(SpatialBranch, MatchesConvThenGelu) {
  Rng rng(2);
  SpatialBranch<double> br(4, false, rng);
  auto x = random_tensor(Shape{2, 4, 5, 5}, 4);
  auto want = gelu(testing::naive_conv2d(x, br.dw->weight, &br.dw->bias, 1, 1, 4));
  EXPECT_LT(max_abs_diff(br.forward(x), want), 1e-6);
}

TEST(WaveletBranch, LinearIdentityKernelReconstructs) {
  Rng rng(3);
  WaveletBranch<double> br(2, true, true, rng);
  zero_all(*br.dw);
  for (std::int64_t c = 0; c < 8; ++c) br.dw->weight.at(c, 0, 1, 1) = 1;
  auto x = random_tensor(Shape{1, 2, 6, 6}, 5);
  EXPECT_LT(max_abs_diff(br.forward(x), x), 1e-5);
  auto odd = random_tensor(Shape{1, 2, 5, 7}, 6);
  EXPECT_LT(max_abs_diff(br.forward(odd), odd), 1e-5);
}

TEST(WaveletBranch, ZeroAndComposition) {
  Rng rng(4);
  WaveletBranch<double> br(3, true, false, rng);
  auto x = random_tensor(Shape{1, 3, 8, 8}, 7);
  const auto bank = WaveletFilterBank<double>::haar(false);
  auto want =
      idwt2_packed(gelu(testing::naive_conv2d(dwt2_packed(x, bank.analysis), br.dw->weight, &br.dw->bias, 1, 1, 12)),
                   bank.synthesis);
  EXPECT_LT(max_abs_diff(br.forward(x), want), 1e-6);
  fill(br.dw->bias, 0.0);
  for (double v : br.forward(Tensor<double>::zeros(Shape{1, 3, 4, 4})).data()) EXPECT_EQ(v, 0.0);
}

TEST(FourierBranch, OpenGateReducesToTwoPointwiseConvs) {
  Rng rng(5);
  FourierBranch<double> br(4, FourierGate::kProcessed, true, 0.1, rng);
  br.set_training(false);
  // identity F_fd path, saturated gate
  for (auto* conv : {br.pw_fd, br.pw_ga}) {
    fill(conv->weight, 0.0);
    fill(conv->bias, 0.0);
  }
  for (std::int64_t c = 0; c < 4; ++c) br.pw_fd->weight.at(c, c, 0, 0) = 1;
  fill(br.pw_ga->bias, 60.0);
  auto x = random_tensor(Shape{1, 4, 6, 6}, 8);
  auto pre = testing::naive_conv2d(x, br.pre->weight, &br.pre->bias, 1, 0, 1);
  auto first_half = split(pre, {2, 2})[0];
  auto want = testing::naive_conv2d(first_half, br.post->weight, &br.post->bias, 1, 0, 1);
  EXPECT_LT(max_abs_diff(br.forward(x), want), 1e-4);
}

TEST(FourierBranch, ZeroInputZeroBiases) {
  Rng rng(6);
  FourierBranch<double> br(4, FourierGate::kProcessed, false, 0.1, rng);
  for (auto* conv : {br.pre, br.pw_fd, br.pw_ga, br.post}) fill(conv->bias, 0.0);
  for (double v : br.forward(Tensor<double>::zeros(Shape{2, 4, 4, 4})).data()) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(FourierBranch, MatchesStepByStepOracle) {
  Rng rng(7);
  FourierBranch<double> br(6, FourierGate::kProcessed, false, 0.1, rng);
  auto x = random_tensor(Shape{2, 6, 4, 6}, 9);
  auto parts = split(testing::naive_conv2d(x, br.pre->weight, &br.pre->bias, 1, 0, 1), {3, 3});
  auto j1 = fft2_packed(parts[0]);
  auto j2 = fft2_packed(parts[1]);
  BatchNormStats<double> s1{br.bn_fd->stats.mean.clone(), br.bn_fd->stats.var.clone()};
  BatchNormStats<double> s2{br.bn_ga->stats.mean.clone(), br.bn_ga->stats.var.clone()};
  auto fd = gelu(testing::naive_conv2d(batchnorm2d(j1, br.bn_fd->gamma, br.bn_fd->beta, s1, true), br.pw_fd->weight,
                                       &br.pw_fd->bias, 1, 0, 1));
  auto ga = sigmoid(testing::naive_conv2d(batchnorm2d(j2, br.bn_ga->gamma, br.bn_ga->beta, s2, true),
                                          br.pw_ga->weight, &br.pw_ga->bias, 1, 0, 1));
  for (double v : ga.data()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  auto want = testing::naive_conv2d(ifft2_packed(mul(fd, ga)), br.post->weight, &br.post->bias, 1, 0, 1);
  EXPECT_LT(max_abs_diff(br.forward(x), want), 1e-5);
}

TEST(FourierBranch, LiteralGateMultipliesJointSpectra) {
  Rng rng(8);
  FourierBranch<double> br(4, FourierGate::kLiteral, false, 0.1, rng);
  auto x = random_tensor(Shape{1, 4, 4, 4}, 10);
  auto parts = split(testing::naive_conv2d(x, br.pre->weight, &br.pre->bias, 1, 0, 1), {2, 2});
  auto want = testing::naive_conv2d(ifft2_packed(mul(fft2_packed(parts[0]), fft2_packed(parts[1]))), br.post->weight,
                                    &br.post->bias, 1, 0, 1);
  EXPECT_LT(max_abs_diff(br.forward(x), want), 1e-10);  EXPECT_EQ(br.pw_fd, nullptr);
  EXPECT_EQ(br.bn_ga, nullptr);
}

TEST(ChannelAttention, ForcedHalfAndOracle) {
  Rng rng(9);
  ChannelAttention<double> ca(8, 4, rng);
  auto x = random_tensor(Shape{2, 8, 5, 5}, 11);
  // squeeze-excite oracle
  auto pooled = reduce_mean(x, kAxisHW);
  auto s = sigmoid(testing::naive_conv2d(gelu(testing::naive_conv2d(pooled, ca.squeeze->weight, &ca.squeeze->bias, 1,
                                                                    0, 1)),
                                         ca.excite->weight, &ca.excite->bias, 1, 0, 1));
  auto want = Tensor<double>::zeros(x.shape());
  for (std::int64_t n = 0; n < 2; ++n)
    for (std::int64_t c = 0; c < 8; ++c)
      for (std::int64_t i = 0; i < 25; ++i) want.at(n, c, i / 5, i % 5) = x.at(n, c, i / 5, i % 5) * s.at(n, c, 0, 0);
  EXPECT_LT(max_abs_diff(ca.forward(x), want), 1e-6);

  fill(ca.excite->weight, 0.0);
  fill(ca.excite->bias, 0.0);
  EXPECT_LT(max_abs_diff(ca.forward(x), scale(x, 0.5)), 1e-15);
}

TEST(ChannelAttention, DependsOnlyOnChannelMeans) {
  Rng rng(10);
  ChannelAttention<double> ca(4, 4, rng);
  auto a = Tensor<double>::zeros(Shape{1, 4, 4, 4});
  auto b = Tensor<double>::zeros(Shape{1, 4, 2, 8});
  for (std::int64_t c = 0; c < 4; ++c) {
    for (std::int64_t i = 0; i < 16; ++i) {
      a.at(0, c, i / 4, i % 4) = 0.2 * double(c) - 0.3;
      b.at(0, c, i / 8, i % 8) = 0.2 * double(c) - 0.3;
    }
  }
  EXPECT_LT(max_abs_diff(ca.weights(a), ca.weights(b)), 1e-15);
}

TEST(Mixer, BranchSplit) {
  EXPECT_EQ(BranchWidths::for_width(8, {}).spatial, 8);
  EXPECT_EQ(BranchWidths::for_width(8, {}).wavelet, 8);
  EXPECT_EQ(BranchWidths::for_width(8, {}).fourier, 16);
  for (int mask = 1; mask < 8; ++mask) {
    BlockOptions o;
    o.spatial_branch = mask & 1;
    o.wavelet_branch = mask & 2;
    o.fourier_branch = mask & 4;
    const auto b = BranchWidths::for_width(8, o);
    EXPECT_EQ(b.spatial + b.wavelet + b.fourier, 32) << mask;
    Rng rng(11);
    SWFormerBlock<double> blk(8, o, rng);
    auto x = random_tensor(Shape{1, 8, 6, 6}, 12);
    EXPECT_EQ(blk.forward(x).shape(), x.shape());
  }
  BlockOptions none;
  none.spatial_branch = none.wavelet_branch = none.fourier_branch = false;
  EXPECT_THROW((void)BranchWidths::for_width(8, none), ConfigError);
}

TEST(Block, ZeroWeightsIsIdentity) {
  Rng rng(12);
  SWFormerBlock<double> blk(8, {}, rng);
  zero_all(blk);
  auto x = random_tensor(Shape{2, 8, 8, 8}, 13);
  EXPECT_EQ(max_abs_diff(blk.forward(x), x), 0.0);
}

TEST(Block, WrongChannelsThrow) {
  Rng rng(13);
  SWFormerBlock<double> blk(8, {}, rng);
  EXPECT_THROW((void)blk.forward(random_tensor(Shape{1, 4, 8, 8}, 1)), DimensionError);
}

TEST(Block, ShapePreservedOnOddSizes) {
  Rng rng(14);
  SWFormerBlock<double> blk(8, {}, rng);
  for (auto [h, w] : {std::pair<std::int64_t, std::int64_t>{7, 9}, {5, 5}, {12, 6}}) {
    auto x = random_tensor(Shape{1, 8, h, w}, std::uint64_t(h + w));
    EXPECT_EQ(blk.forward(x).shape(), x.shape());
  }
}

TEST(Msfn, SplitAndConstantInput) {
  EXPECT_EQ(MSFN<double>::split_sizes(8), (std::array<std::int64_t, 3>{6, 5, 5}));
  EXPECT_EQ(MSFN<double>::split_sizes(12), (std::array<std::int64_t, 3>{8, 8, 8}));
  Rng rng(15);
  MSFN<double> ffn(8, true, rng);
  auto y = ffn.forward(Tensor<double>::full(Shape{1, 8, 8, 8}, 0.4));
  for (std::int64_t c = 0; c < 8; ++c)
    for (std::int64_t i = 0; i < 64; ++i) EXPECT_NEAR(y.at(0, c, i / 8, i % 8), y.at(0, c, 0, 0), 1e-12);
}

TEST(Block, GradCheck) {
  Rng rng(16);
  SWFormerBlock<double> blk(8, {}, rng);
  auto x = random_tensor(Shape{1, 8, 8, 8}, 17).set_requires_grad(true);
  auto w = random_tensor(Shape{1, 8, 8, 8}, 18);
  auto params = blk.named_parameters();
  params.push_back({"input", x});
  auto r = grad_check([&] { return mean(mul(blk.forward(x), w)); }, params, 1e-3, {.max_entries = 24, .seed = 1});
  EXPECT_TRUE(r.passed) << r.summary();
}

}  // namespace
}  // namespace swformer
