#include <benchmark/benchmark.h>

#include "swformer/blocks.hpp"
#include "swformer/network.hpp"
#include "swformer/ops.hpp"
#include "swformer/rng.hpp"
#include "swformer/transforms.hpp"

namespace swformer {
namespace {

Tensor<float> noise(Shape s, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(static_cast<std::size_t>(s.numel()));
  for (auto& x : v) x = static_cast<float>(rng.uniform(-1, 1));
  return Tensor<float>::from_data(s, std::move(v));
}

void BM_Conv2d3x3(benchmark::State& state) {
  const auto c = state.range(0);
  const auto n = state.range(1);
  auto x = noise(Shape{1, c, n, n}, 1);
  auto w = noise(Shape{c, c, 3, 3}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, w, Tensor<float>(), {.padding = 1}));
  state.SetItemsProcessed(state.iterations() * c * c * 9 * n * n);
}
BENCHMARK(BM_Conv2d3x3)->Args({8, 32})->Args({16, 64})->Args({32, 64});

void BM_Depthwise3x3(benchmark::State& state) {
  const auto c = state.range(0);
  auto x = noise(Shape{1, c, 64, 64}, 1);
  auto w = noise(Shape{c, 1, 3, 3}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, w, Tensor<float>(), {.padding = 1, .groups = c}));
}
BENCHMARK(BM_Depthwise3x3)->Arg(16)->Arg(64);

void BM_Fft2(benchmark::State& state) {
  const auto n = state.range(0);
  auto x = noise(Shape{1, 16, n, n}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(ifft2_packed(fft2_packed(x)));
}
BENCHMARK(BM_Fft2)->Arg(16)->Arg(64)->Arg(60);

void BM_Dwt2(benchmark::State& state) {
  const auto& bank = fixed_haar<float>();
  auto x = noise(Shape{1, 16, 64, 64}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(idwt2_packed(dwt2_packed(x, bank.analysis), bank.synthesis));
}
BENCHMARK(BM_Dwt2);

void BM_BlockForward(benchmark::State& state) {
  const auto c = state.range(0);
  Rng rng(5);
  SWFormerBlock<float> block(c, BlockOptions{}, rng);
  block.set_training(false);
  auto x = noise(Shape{1, c, 32, 32}, 6);
  NoGradGuard ng;
  for (auto _ : state) benchmark::DoNotOptimize(block.forward(x));
}
BENCHMARK(BM_BlockForward)->Arg(8)->Arg(16);

void BM_BlockForwardBackward(benchmark::State& state) {
  const auto c = state.range(0);
  Rng rng(5);
  SWFormerBlock<float> block(c, BlockOptions{}, rng);
  auto x = noise(Shape{1, c, 32, 32}, 6);
  for (auto _ : state) {
    backward(mean(block.forward(x)));
    block.zero_grad();
  }
}
BENCHMARK(BM_BlockForwardBackward)->Arg(8)->Arg(16);

void BM_NetworkRestore(benchmark::State& state) {
  auto cfg = ModelConfig::tiny();
  cfg.variant = static_cast<Variant>(state.range(1));
  SWFormerNet<float> net(cfg, 7);
  net.set_training(false);
  auto x = noise(Shape{1, 3, state.range(0), state.range(0)}, 8);
  NoGradGuard ng;
  for (auto _ : state) benchmark::DoNotOptimize(net.restore(x));
}
BENCHMARK(BM_NetworkRestore)->Args({64, 0})->Args({64, 1})->Args({64, 2})->Args({128, 2});

}  // namespace
}  // namespace swformer

BENCHMARK_MAIN();
