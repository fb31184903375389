// Acceptance runner. `swformer_acceptance N` runs criterion N, no argument
// runs all eleven. Each prints one PASS/FAIL line with measured values.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "scratch.hpp"
#include "swformer/analysis.hpp"
#include "swformer/checkpoint.hpp"
#include "swformer/data.hpp"
#include "swformer/grad_check.hpp"
#include "swformer/image_io.hpp"
#include "swformer/network.hpp"
#include "swformer/objective.hpp"
#include "swformer/ops.hpp"
#include "swformer/optim.hpp"
#include "swformer/train.hpp"
#include "swformer/transforms.hpp"
#include "swformer_cli/commands.hpp"

namespace swformer {
namespace {

using testing::max_abs_diff;
using testing::random_tensor;

// Collects pass/fail conditions and the numbers behind them.
struct Outcome {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back("violated: " + what);
    }
  }
  void note(const std::string& text) { notes.push_back(text); }
};

std::string fmt(double v, int prec = 3) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

// ---- 1: transform round trips ------------------------------------------

Outcome transforms_round_trip() {
  Outcome o;
  Rng rng(1);
  const auto& bank = fixed_haar<float>();
  double worst_dwt = 0, worst_fft = 0, worst_parseval = 0;
  for (int i = 0; i < 100; ++i) {
    const Shape s{1 + std::int64_t((rng.next_u64() % 2)), 1 + std::int64_t((rng.next_u64() % 8)),
                  2 * (1 + std::int64_t((rng.next_u64() % 16))), 2 * (1 + std::int64_t((rng.next_u64() % 16)))};
    auto x = random_tensor<float>(s, 100 + std::uint64_t(i));
    worst_dwt = std::max(worst_dwt, max_abs_diff(idwt2(dwt2(x, bank), bank), x));
    auto spec = fft2_packed(x);
    worst_fft = std::max(worst_fft, max_abs_diff(ifft2_packed(spec), x));
    const double ex = testing::sum_sq(x);
    worst_parseval = std::max(worst_parseval, std::abs(testing::sum_sq(spec) - ex) / ex);
  }
  o.note("idwt(dwt) max err " + fmt(worst_dwt));
  o.note("ifft(fft) max err " + fmt(worst_fft));
  o.note("Parseval rel err " + fmt(worst_parseval));
  o.require(worst_dwt <= 1e-5, "dwt round trip <= 1e-5");
  o.require(worst_fft <= 1e-5, "fft round trip <= 1e-5");
  o.require(worst_parseval <= 1e-4, "Parseval <= 1e-4");
  return o;
}

// ---- 2: gradient suite -------------------------------------------------

void record_check(Outcome& o, const std::string& name, const GradCheckReport& r, double& worst) {
  worst = std::max(worst, r.worst());
  o.require(r.passed, name + " gradcheck: " + r.summary());
}

Outcome gradient_suite() {
  Outcome o;
  constexpr double kTol = 1e-3;
  using D = Tensor<double>;
  auto x = random_tensor(Shape{2, 4, 6, 6}, 1).set_requires_grad(true);
  auto y = random_tensor(Shape{2, 4, 6, 6}, 2).set_requires_grad(true);
  auto w = random_tensor(Shape{4, 2, 3, 3}, 3, -0.5, 0.5).set_requires_grad(true);
  auto b = random_tensor(Shape{1, 4, 1, 1}, 4).set_requires_grad(true);
  auto wt = random_tensor(Shape{4, 1, 2, 2}, 5, -0.5, 0.5).set_requires_grad(true);
  auto gamma = random_tensor(Shape{1, 4, 1, 1}, 6, 0.5, 1.5).set_requires_grad(true);
  auto beta = random_tensor(Shape{1, 4, 1, 1}, 7).set_requires_grad(true);
  auto filt = WaveletFilterBank<double>::haar(true);
  filt.analysis.set_requires_grad(true);
  filt.synthesis.set_requires_grad(true);
  // a fixed random projection turns every op output into a scalar
  auto project = [](const D& t) { return sum(mul(t, random_tensor(t.shape(), 99))); };

  struct Case {
    std::string name;
    std::function<D()> f;
    std::vector<NamedTensor<double>> params;
  };
  std::vector<Case> cases{
      {"add", [&] { return project(add(x, y)); }, {{"x", x}, {"y", y}}},
      {"sub", [&] { return project(sub(x, y)); }, {{"x", x}, {"y", y}}},
      {"mul", [&] { return project(mul(x, y)); }, {{"x", x}, {"y", y}}},
      {"scale", [&] { return project(add_scalar(scale(x, 1.7), 0.3)); }, {{"x", x}}},
      {"abs", [&] { return project(abs(x)); }, {{"x", x}}},
      {"gelu", [&] { return project(gelu(x)); }, {{"x", x}}},
      {"sigmoid", [&] { return project(sigmoid(x)); }, {{"x", x}}},
      {"conv2d", [&] { return project(conv2d(x, w, b, {.stride = 2, .padding = 1, .groups = 2})); },
       {{"x", x}, {"w", w}, {"b", b}}},
      {"conv2d_transpose", [&] { return project(conv2d_transpose(x, wt, D(), {.stride = 2, .groups = 4})); },
       {{"x", x}, {"w", wt}}},
      {"batchnorm_train",
       [&] {
         BatchNormStats<double> st{D::zeros(Shape{1, 4, 1, 1}), D::ones(Shape{1, 4, 1, 1})};
         return project(batchnorm2d(x, gamma, beta, st, true));
       },
       {{"x", x}, {"gamma", gamma}, {"beta", beta}}},
      {"batchnorm_eval",
       [&] {
         BatchNormStats<double> st{random_tensor(Shape{1, 4, 1, 1}, 8), random_tensor(Shape{1, 4, 1, 1}, 9, 0.5, 2)};
         return project(batchnorm2d(x, gamma, beta, st, false));
       },
       {{"x", x}, {"gamma", gamma}, {"beta", beta}}},
      {"layer_norm", [&] { return project(layer_norm_channels(x, gamma, beta)); },
       {{"x", x}, {"gamma", gamma}, {"beta", beta}}},
      {"concat_split",
       [&] {
         auto parts = split(x, {1, 3});
         return project(concat<double>({parts[1], y, parts[0]}));
       },
       {{"x", x}, {"y", y}}},
      {"reduce_mean", [&] { return add(project(reduce_mean(x, kAxisHW)), project(reduce_mean(y, kAxisC))); },
       {{"x", x}, {"y", y}}},
      {"avg_pool", [&] { return project(avg_pool(x, 4)); }, {{"x", x}}},
      {"bilinear_resize", [&] { return project(bilinear_resize(x, 9, 4)); }, {{"x", x}}},
      {"pad_crop", [&] { return project(crop(pad_reflect(x, Padding{2, 1, 0, 3}), 1, 2, 5, 4)); }, {{"x", x}}},
      {"fft2", [&] { return project(fft2_packed(x)); }, {{"x", x}}},
      {"ifft2", [&] { return project(ifft2_packed(concat<double>({x, y}))); }, {{"x", x}, {"y", y}}},
      {"dwt2", [&] { return project(dwt2_packed(x, filt.analysis)); }, {{"x", x}, {"analysis", filt.analysis}}},
      {"idwt2", [&] { return project(idwt2_packed(concat<double>({x, y}), filt.synthesis)); },
       {{"x", x}, {"synthesis", filt.synthesis}}},
      {"pixel_shuffle", [&] { return project(pixel_shuffle(pixel_unshuffle(x), 2)); }, {{"x", x}}},
      {"pixel_unshuffle", [&] { return project(pixel_unshuffle(x, 3)); }, {{"x", x}}},
  };
  double worst = 0;
  for (const auto& c : cases) record_check(o, c.name, grad_check(c.f, c.params, kTol, {.step = 1e-4}), worst);
  o.note(std::to_string(cases.size()) + " ops, worst rel err " + fmt(worst));

  // one block and the tiny network (C=8, one block per stage, 1x3x16x16)
  const auto checks = cli::network_grad_check(ModelConfig::tiny(), 16, kTol, 8, 0);
  double worst_net = 0;
  for (const auto& c : checks) record_check(o, c.name, c.report, worst_net);
  o.require(!checks.empty(), "network checks ran");
  o.note(std::to_string(checks.size()) + " block/network groups, worst rel err " + fmt(worst_net));
  return o;
}

// ---- 3: residual identity ----------------------------------------------

Outcome residual_identity() {
  Outcome o;
  double worst_forward = 0, worst_restore = 0;
  for (auto v : {Variant::kSmall, Variant::kMedium, Variant::kLarge}) {
    auto cfg = ModelConfig::tiny();
    cfg.variant = v;
    cfg.zero_init_heads = true;
    SWFormerNet<float> net(cfg, 3);
    for (std::int64_t size : {16, 24, 32}) {
      auto x = random_tensor<float>(Shape{1, 3, size, size}, std::uint64_t(size), 0, 1);
      auto p = decompose_input(x);
      auto out = net.forward(p);
      for (int k = exit_level(v); k < 3; ++k) worst_forward = std::max(worst_forward, max_abs_diff(*out.levels[k], p.levels[k]));
      auto r = net.restore(x);
      worst_restore = std::max(worst_restore, max_abs_diff(*r[exit_level(v)], x));
    }
  }
  o.note("max |O - I| over pyramid levels " + fmt(worst_forward));
  o.note("max |restored - input| " + fmt(worst_restore));
  o.require(worst_forward == 0.0, "forward output equals input pyramid exactly");
  o.require(worst_restore <= 1e-5, "reconstructed image within float round-off (1e-5)");
  return o;
}

// ---- 4: early-exit prefix ----------------------------------------------

Outcome early_exit_prefix() {
  Outcome o;
  int identical = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto small_cfg = ModelConfig::tiny();
    small_cfg.variant = Variant::kSmall;
    SWFormerNet<float> large(ModelConfig::tiny(), seed);
    SWFormerNet<float> small(small_cfg, seed);
    auto p = decompose_input(random_tensor<float>(Shape{1, 3, 16, 16}, 1000 + seed, 0, 1));
    NoGradGuard ng;
    auto ol = large.forward(p);
    auto os = small.forward(p);
    auto oe = large.forward(p, Variant::kSmall);
    const bool same = max_abs_diff(*ol.levels[2], *os.levels[2]) == 0.0 && max_abs_diff(*oe.levels[2], *os.levels[2]) == 0.0;
    identical += same ? 1 : 0;
  }
  o.note(std::to_string(identical) + "/20 seeds bit-identical");
  o.require(identical == 20, "quarter-scale outputs bit-identical for all seeds");
  return o;
}

// ---- 5: loss correctness -----------------------------------------------

double brute_fourier_term(const Tensor<double>& r) {
  const Shape s = r.shape();
  double acc = 0;
  for (std::int64_t n = 0; n < s.n; ++n)
    for (std::int64_t c = 0; c < s.c; ++c) {
      std::vector<std::complex<double>> plane(static_cast<std::size_t>(s.h * s.w));
      for (std::int64_t y = 0; y < s.h; ++y)
        for (std::int64_t x = 0; x < s.w; ++x) plane[std::size_t(y * s.w + x)] = r.at(n, c, y, x);
      for (const auto& z : testing::brute_dft2(plane, s.h, s.w)) acc += std::abs(z.real()) + std::abs(z.imag());
    }
  return acc / double(2 * s.numel());
}

Outcome loss_correctness() {
  Outcome o;
  const LossConfig cfg;
  auto g = random_tensor(Shape{2, 3, 8, 8}, 1, 0, 1);
  const double at_identity = domain_loss(g, g, cfg).total.item();
  o.require(at_identity == 0.0, "loss 0 at identity");

  auto unit = domain_loss(add_scalar(g, 1.0), g, cfg);
  o.note("unit residual spatial " + fmt(unit.spatial.item(), 12) + " wavelet " + fmt(unit.wavelet.item(), 12));
  o.require(std::abs(unit.spatial.item() - 1.0) <= 1e-12, "spatial term 1.0");
  o.require(std::abs(unit.wavelet.item() - 0.5) <= 1e-12, "wavelet term 0.5");

  auto out = random_tensor(Shape{2, 3, 8, 6}, 2, 0, 1);
  auto tgt = random_tensor(Shape{2, 3, 8, 6}, 3, 0, 1);
  auto terms = domain_loss(out, tgt, cfg);
  const double oracle = brute_fourier_term(sub(out, tgt));
  const double fdiff = std::abs(terms.fourier.item() - oracle);
  o.note("Fourier term vs brute DFT " + fmt(fdiff));
  o.require(fdiff <= 1e-5, "Fourier term within 1e-5 of brute force");

  // total = spatial + w * wavelet + lambda * fourier; perturb each weight
  const double base = terms.total.item();
  o.require(std::abs(base - (terms.spatial.item() + terms.wavelet.item() + 0.1 * terms.fourier.item())) <= 1e-12,
            "total uses lambda 0.1");
  LossConfig lam = cfg;
  lam.lambda_fourier = 0.3;
  const double dl = domain_loss(out, tgt, lam).total.item() - base;
  LossConfig wav = cfg;
  wav.wavelet_weight = 2.0;
  const double dw = domain_loss(out, tgt, wav).total.item() - base;
  o.note("d total / d lambda " + fmt(dl / 0.2, 12) + " (Fourier " + fmt(terms.fourier.item(), 12) + ")");
  o.require(std::abs(dl - 0.2 * terms.fourier.item()) <= 1e-12, "lambda sensitivity equals Fourier term");
  o.require(std::abs(dw - terms.wavelet.item()) <= 1e-12, "wavelet weight sensitivity equals wavelet term");
  return o;
}

// ---- 6: optimizer and schedule -----------------------------------------

Outcome optimizer_schedule() {
  Outcome o;
  double worst = 0;
  for (double wd : {0.0, 0.01}) {
    auto p = Tensor<double>::scalar(1.0).set_requires_grad(true);
    AdamW<double> opt({{"theta", p}}, {.weight_decay = wd});
    testing::ScalarAdamW ref{.theta = 1.0, .lr = 1e-2, .wd = wd};
    for (int t = 0; t < 10; ++t) {
      p.zero_grad();
      backward(mul(p, p));  // f = theta^2
      ref.step(2 * ref.theta);
      opt.step(1e-2);
      worst = std::max(worst, std::abs(p.item() - ref.theta));
    }
  }
  o.note("AdamW trace max err " + fmt(worst));
  o.require(worst <= 1e-10, "AdamW trace within 1e-10");

  CosineSchedule s{.lr_init = 1e-3, .lr_min = 1e-6, .total_steps = 1000};
  o.note("lr(0) " + fmt(s.lr(0), 17) + " lr(T) " + fmt(s.lr(1000), 17));
  o.require(s.lr(0) == 1e-3, "lr(0) == 1e-3 exactly");
  o.require(s.lr(1000) == 1e-6, "lr(T) == 1e-6 exactly");
  bool monotone = true;
  for (std::int64_t t = 1; t <= 1000; ++t) monotone = monotone && s.lr(t) <= s.lr(t - 1);
  o.require(monotone, "schedule non-increasing over 1000 points");
  return o;
}

// ---- 7: smoke training --------------------------------------------------

std::vector<PairedSample> smoke_corpus() {
  // quantized like a corpus that went through make-corpus and PNG files
  auto corpus = make_corpus(8, 64, {DegradationSpec{}}, 7);
  for (auto& s : corpus) {
    s.degraded = quantize8(s.degraded);
    s.clean = quantize8(s.clean);
  }
  return corpus;
}

Outcome smoke_training() {
  Outcome o;
  constexpr double kThresholdDb = 35.0;  // calibrated at 37.25 dB, see README
  const auto corpus = smoke_corpus();
  TrainConfig cfg;
  cfg.steps = 2000;
  cfg.seed = 7;
  SWFormerNet<float> net(ModelConfig::tiny(), cfg.seed);
  Trainer trainer(net, corpus, cfg);
  const auto log = trainer.run();
  const double psnr_db = evaluate(net, corpus).mean_psnr;
  o.note("train PSNR " + fmt(psnr_db, 5) + " dB after " + std::to_string(log.records.size()) + " steps (pinned >= 35)");
  o.require(psnr_db >= kThresholdDb, "training PSNR >= 35 dB");

  // an independent rerun reproduces the first 100 steps bit for bit
  TrainConfig again = cfg;
  again.steps = 100;
  again.schedule_steps = cfg.steps;
  SWFormerNet<float> net2(ModelConfig::tiny(), cfg.seed);
  const auto log2 = train(net2, corpus, LossConfig{}, again);
  bool same = log2.records.size() == 100;
  for (std::size_t i = 0; same && i < log2.records.size(); ++i) same = log2.records[i].to_json() == log.records[i].to_json();
  o.note(same ? "rerun of 100 steps identical" : "rerun diverged");
  o.require(same, "deterministic under fixed seed");
  return o;
}

// ---- 8: ablation scaffolding --------------------------------------------

Outcome ablation_scaffolding() {
  Outcome o;
  const auto corpus = make_corpus(4, 16, {DegradationSpec{}}, 8);
  TrainConfig tc;
  tc.steps = 100;
  tc.batch = 2;
  tc.patch = 16;
  tc.seed = 8;

  struct Ablation {
    std::string name;
    ModelConfig cfg;
  };
  std::vector<Ablation> configs;
  for (auto mode : {InterBlock::kSISO, InterBlock::kMIMO, InterBlock::kLMIMO}) {
    auto c = ModelConfig::tiny();
    c.inter_block = mode;
    configs.push_back({inter_block_name(mode), c});
  }
  auto toggle = [&](const std::string& name, auto&& edit) {
    auto c = ModelConfig::tiny();
    edit(c.block);
    configs.push_back({name, c});
  };
  toggle("no_spatial", [](BlockOptions& b) { b.spatial_branch = false; });
  toggle("no_wavelet", [](BlockOptions& b) { b.wavelet_branch = false; });
  toggle("no_fourier", [](BlockOptions& b) { b.fourier_branch = false; });
  toggle("fixed_wavelet", [](BlockOptions& b) { b.learnable_wavelet = false; });
  toggle("single_scale_msfn", [](BlockOptions& b) { b.msfn_multiscale = false; });
  toggle("literal_gate", [](BlockOptions& b) { b.gate = FourierGate::kLiteral; });
  toggle("layer_scale", [](BlockOptions& b) { b.layer_scale = true; });

  std::vector<std::int64_t> counts;
  std::ostringstream summary;
  for (const auto& v : configs) {
    try {
      SWFormerNet<float> net(v.cfg, tc.seed);
      const auto log = train(net, corpus, LossConfig{}, tc);
      const bool finite = !log.records.empty() && std::isfinite(log.records.back().loss);
      o.require(log.records.size() == 100 && finite, v.name + " trains 100 finite steps");
      counts.push_back(count_params(v.cfg));
      summary << v.name << "=" << counts.back() << " ";
    } catch (const std::exception& e) {
      o.require(false, v.name + " threw: " + e.what());
      counts.push_back(-1);
    }
  }
  o.note("params " + summary.str());
  o.require(counts[0] < counts[1] && counts[1] < counts[2], "params SISO < MIMO < LMIMO");
  // single-scale MSFN keeps the depthwise parameter count by construction
  for (std::size_t i = 3; i < configs.size(); ++i) {
    if (configs[i].name == "single_scale_msfn") continue;
    o.require(counts[i] != counts[2], configs[i].name + " changes the parameter count");
  }
  return o;
}

// ---- 9: sub-band swap ---------------------------------------------------

Outcome subband_swap() {
  Outcome o;
  const std::set<Band> all(kAllBands.begin(), kAllBands.end());
  const std::vector<std::set<Band>> subsets{{Band::kLL}, {Band::kLH}, {Band::kHL, Band::kHH}, {Band::kLL, Band::kHH}, all};
  double worst_total = 0, worst_inv = 0, worst_bright = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::int64_t size = 16 + 8 * std::int64_t(i % 3);
    auto a = make_clean(static_cast<CleanKind>(i % 4), size, size, 2 * i + 1);
    auto b = make_clean(static_cast<CleanKind>((i + 1) % 4), size, size, 2 * i + 2);
    auto t = swap_subbands(a, b, all);
    worst_total = std::max({worst_total, max_abs_diff(t.a, b), max_abs_diff(t.b, a)});
    for (const auto& bands : subsets) {
      auto once = swap_subbands(a, b, bands);
      auto twice = swap_subbands(once.a, once.b, bands);
      worst_inv = std::max({worst_inv, max_abs_diff(twice.a, a), max_abs_diff(twice.b, b)});
    }
    auto dark = b.detach();
    for (auto& v : dark.data()) v *= 0.5f;
    auto s = swap_subbands(dark, b, {Band::kLL});
    const double mb = testing::mean_of(b), md = testing::mean_of(dark);
    worst_bright = std::max({worst_bright, std::abs(testing::mean_of(s.a) - mb) / mb,
                             std::abs(testing::mean_of(s.b) - md) / md});
  }
  o.note("total exchange err " + fmt(worst_total) + ", involution err " + fmt(worst_inv) +
         ", LL brightness rel err " + fmt(worst_bright));
  o.require(worst_total <= 1e-5, "total exchange within 1e-5");
  o.require(worst_inv <= 1e-5, "involution within 1e-5");
  o.require(worst_bright <= 0.02, "brightness transfers with LL within 2%");
  return o;
}

// ---- 10: checkpoint round trip -------------------------------------------

Outcome checkpoint_round_trip() {
  Outcome o;
  testing::ScratchDir dir("acceptance_ckpt");
  const auto corpus = make_corpus(4, 32, {DegradationSpec{}}, 10);
  TrainConfig tc;
  tc.steps = 50;
  tc.batch = 2;
  tc.patch = 16;
  tc.seed = 10;

  SWFormerNet<float> full(ModelConfig::tiny(), tc.seed);
  Trainer a(full, corpus, tc);
  const auto la = a.run();
  a.checkpoint("{}").save(dir.str("full.bin"));
  SWFormerNet<float> loaded(ModelConfig::tiny(), 12345);
  restore(loaded, Checkpoint::load(dir.str("full.bin")));
  double fwd = 0;
  for (const auto& s : corpus) fwd = std::max(fwd, max_abs_diff(restore_image(full, s.degraded), restore_image(loaded, s.degraded)));
  o.note("save/load forward max diff " + fmt(fwd));
  o.require(fwd == 0.0, "loaded model forward bit-identical");

  SWFormerNet<float> part(ModelConfig::tiny(), tc.seed);
  Trainer b(part, corpus, tc);
  b.run(25);
  b.checkpoint("{}").save(dir.str("half.bin"));
  SWFormerNet<float> resumed(ModelConfig::tiny(), 54321);
  Trainer c(resumed, corpus, tc);
  c.resume(Checkpoint::load(dir.str("half.bin")));
  const auto lc = c.run();
  bool same = lc.records.size() == 25;
  for (std::size_t i = 0; same && i < 25; ++i) same = lc.records[i].to_json() == la.records[25 + i].to_json();
  const bool weights = capture(resumed, "{}", 0, &c.optimizer()).serialize() == capture(full, "{}", 0, &a.optimizer()).serialize();
  o.note(std::string("resumed trajectory ") + (same ? "identical" : "differs") + ", final state " +
         (weights ? "identical" : "differs"));
  o.require(same, "resumed log equals uninterrupted steps 25..49");
  o.require(weights, "resumed weights and moments equal uninterrupted");
  return o;
}

// ---- 11: metrics ---------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome metrics() {
  Outcome o;
  auto x = Tensor<float>::full(Shape{1, 3, 16, 16}, 0.4f);
  auto y = Tensor<float>::full(Shape{1, 3, 16, 16}, 0.5f);
  const double p = psnr(x, y);
  o.note("PSNR(0.1 offset) " + fmt(p, 10) + " dB");
  o.require(std::abs(p - 20.0) <= 1e-4, "PSNR 20 dB within 1e-4");
  auto img = make_clean(CleanKind::kGlyphs, 32, 32, 11);
  const double s = ssim(img, img);
  o.note("SSIM(x, x) " + fmt(s, 15));
  o.require(std::abs(s - 1.0) <= 1e-9, "SSIM self-similarity 1 within 1e-9");

  // eval reports follow the y_channel flag in their records and numbers
  testing::ScratchDir dir("acceptance_metrics");
  auto pairs = make_corpus(2, 16, {DegradationSpec{}}, 11);
  save_corpus(dir.str("corpus"), pairs, "{}");
  for (bool yc : {true, false}) {
    cli::RunOptions opt;
    opt.command = "eval";
    opt.out = dir.str(yc ? "y" : "rgb");
    opt.overrides = {"eval.degraded=" + dir.str("corpus/degraded"), "eval.clean=" + dir.str("corpus/clean"),
                     std::string("eval.y_channel=") + (yc ? "true" : "false")};
    std::ostringstream out, err;
    const int code = cli::run(opt, out, err);
    o.require(code == 0, "eval exits 0: " + err.str());
    if (code != 0) continue;
    std::istringstream lines(slurp(dir.str(std::string(yc ? "y" : "rgb") + "/metrics.jsonl")));
    std::string line;
    int checked = 0;
    while (std::getline(lines, line)) {
      auto j = nlohmann::json::parse(line);
      o.require(j["y_channel"].get<bool>() == yc, "report records y_channel flag");
      if (j.contains("summary")) continue;
      const auto& pair = pairs[std::size_t(checked++)];
      auto d = quantize8(pair.degraded);
      auto c = quantize8(pair.clean);
      const double want = yc ? psnr(to_y_channel(d), to_y_channel(c)) : psnr(d, c);
      o.require(std::abs(j["psnr"].get<double>() - want) <= 1e-6,
                std::string(yc ? "Y" : "RGB") + " PSNR matches direct computation");
    }
    o.require(checked == 2, "two images evaluated");
  }
  o.note("eval y_channel=true/false reports checked");
  return o;
}

struct Criterion {
  const char* name;
  double budget_s;
  Outcome (*run)();
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {"transform round trips", 5, transforms_round_trip},
      {"gradient suite", 120, gradient_suite},
      {"residual identity", 10, residual_identity},
      {"early-exit prefix", 30, early_exit_prefix},
      {"loss correctness", 5, loss_correctness},
      {"optimizer and schedule", 1, optimizer_schedule},
      {"smoke training", 900, smoke_training},
      {"ablation scaffolding", 300, ablation_scaffolding},
      {"sub-band swap", 10, subband_swap},
      {"checkpoint round trip", 120, checkpoint_round_trip},
      {"metrics", 5, metrics},
  };
  return list;
}

bool run_one(int index) {
  const auto& c = criteria()[std::size_t(index - 1)];
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < c.budget_s, "runtime under " + fmt(c.budget_s) + " s");
  std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << index << ": " << c.name;
  for (const auto& n : o.notes) std::cout << " | " << n;
  std::cout << " | " << fmt(secs) << " s of " << fmt(c.budget_s) << " s\n" << std::flush;
  return o.ok;
}

}  // namespace
}  // namespace swformer

int main(int argc, char** argv) {
  const int n = static_cast<int>(swformer::criteria().size());
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > n) {
      std::cerr << "usage: swformer_acceptance [1.." << n << "]...\n";
      return 2;
    }
    which.push_back(k);
  }
  if (which.empty())
    for (int k = 1; k <= n; ++k) which.push_back(k);
  bool ok = true;
  for (int k : which) ok = swformer::run_one(k) && ok;
  return ok ? 0 : 1;
}
