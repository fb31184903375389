#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "scratch.hpp"
#include "swformer/checkpoint.hpp"
#include "swformer/image_io.hpp"
#include "swformer_cli/commands.hpp"

namespace swformer::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::string& command, const std::string& out_dir, std::vector<std::string> sets,
               std::optional<std::uint64_t> seed = 1, std::optional<std::string> variant = std::nullopt) {
  RunOptions opt;
  opt.command = command;
  opt.out = out_dir;
  opt.overrides = std::move(sets);
  opt.seed = seed;
  opt.variant = std::move(variant);
  std::ostringstream o, e;
  const int code = run(opt, o, e);
  return {code, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return files;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = dir_.str("corpus");
    ASSERT_EQ(run_cli("make-corpus", corpus_, {"data.n_images=3", "data.size=16"}).code, 0);
  }
  swformer::testing::ScratchDir dir_{"cli"};
  std::string corpus_;
};

TEST_F(Cli, MakeCorpusWritesManifestAndIsIdempotent) {
  for (const char* f : {"manifest.json", "config.json", "degraded/img_0000.png", "clean/img_0002.png"}) {
    EXPECT_TRUE(fs::exists(fs::path(corpus_) / f)) << f;
  }
  auto manifest = json::parse(slurp(fs::path(corpus_) / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 1);
  EXPECT_TRUE(manifest.contains("config_hash"));
  EXPECT_TRUE(manifest["versions"].contains("swformer"));
  ASSERT_EQ(run_cli("make-corpus", dir_.str("again"), {"data.n_images=3", "data.size=16"}).code, 0);
  EXPECT_EQ(tree(corpus_), tree(dir_.str("again")));
}

TEST_F(Cli, ErrorsAreSingleJsonLinesWithDistinctCodes) {
  auto bad_key = run_cli("train", dir_.str("x"), {"model.bogus=1"});
  EXPECT_EQ(bad_key.code, kExitConfig);
  auto j = json::parse(bad_key.err);
  EXPECT_EQ(j["exit_code"], kExitConfig);
  EXPECT_NE(j["message"].get<std::string>().find("model.bogus"), std::string::npos);
  EXPECT_EQ(std::count(bad_key.err.begin(), bad_key.err.end(), '\n'), 1);

  auto bad_value = run_cli("train", dir_.str("x"), {"model.width=7", "data.root=" + corpus_});
  EXPECT_EQ(bad_value.code, kExitConfig);
  auto missing = run_cli("eval", dir_.str("x"), {"eval.degraded=/nonexistent/a", "eval.clean=/nonexistent/b"});
  EXPECT_EQ(missing.code, kExitIo);
  EXPECT_EQ(json::parse(missing.err)["error"], "io");
  auto bad_variant = run_cli("infer", dir_.str("x"), {"infer.input=" + corpus_ + "/degraded"}, 1, "xl");
  EXPECT_EQ(bad_variant.code, kExitConfig);
}

TEST_F(Cli, NanTrainingAborts) {
  auto r = run_cli("train", dir_.str("nan"),
                   {"data.root=" + corpus_, "model.preset=tiny", "train.steps=3", "train.patch=16", "train.lr_init=1e300",
                    "train.lr_min=1e300"});
  EXPECT_EQ(r.code, kExitNumeric) << r.err;
}

TEST_F(Cli, ZeroHeadInferenceReproducesInputs) {
  const std::string out = dir_.str("infer");
  auto r = run_cli("infer", out, {"infer.input=" + corpus_ + "/degraded", "model.preset=tiny", "model.zero_init_heads=true"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* exit : {"s", "m", "l"}) {
    for (int i = 0; i < 3; ++i) {
      const std::string name = "img_000" + std::to_string(i) + ".png";
      const auto want = slurp(fs::path(corpus_) / "degraded" / name);
      EXPECT_EQ(slurp(fs::path(out) / exit / name), want) << exit << "/" << name;
    }
  }
  auto small = run_cli("infer", dir_.str("infer_s"),
                       {"infer.input=" + corpus_ + "/degraded", "model.preset=tiny", "model.zero_init_heads=true"}, 1, "s");
  ASSERT_EQ(small.code, 0) << small.err;
  EXPECT_TRUE(fs::exists(dir_.str("infer_s/s")));
  EXPECT_FALSE(fs::exists(dir_.str("infer_s/l")));
}

TEST_F(Cli, EvalOnIdenticalFolders) {
  for (const char* y : {"true", "false"}) {
    const std::string out = dir_.str(std::string("eval_") + y);
    auto r = run_cli("eval", out, {"eval.degraded=" + corpus_ + "/clean", "eval.clean=" + corpus_ + "/clean",
                                   std::string("eval.y_channel=") + y});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(slurp(fs::path(out) / "metrics.jsonl"));
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
      auto j = json::parse(line);
      EXPECT_EQ(j["y_channel"].get<bool>(), std::string(y) == "true");
      if (j.contains("summary")) continue;
      ++n;
      EXPECT_EQ(j["psnr"], "inf");
      EXPECT_EQ(j["ssim"], 1.0);
    }
    EXPECT_EQ(n, 3);
  }
}

TEST_F(Cli, TrainEvalResumeRoundTrip) {
  const std::string run1 = dir_.str("run1");
  const std::vector<std::string> base{"data.root=" + corpus_, "model.preset=tiny", "train.patch=16", "train.batch=2"};
  auto sets = base;
  sets.push_back("train.steps=4");
  ASSERT_EQ(run_cli("train", run1, sets).code, 0);
  EXPECT_TRUE(fs::exists(fs::path(run1) / "checkpoint.bin"));
  EXPECT_TRUE(fs::exists(fs::path(run1) / "train_log.jsonl"));
  auto cfg = json::parse(slurp(fs::path(run1) / "config.json"));
  EXPECT_EQ(cfg["train.steps"], "4");
  EXPECT_EQ(cfg["loss.lambda_fourier"], "0.10000000000000001");

  // same run twice gives identical files
  ASSERT_EQ(run_cli("train", dir_.str("run1b"), sets).code, 0);
  EXPECT_EQ(tree(run1), tree(dir_.str("run1b")));

  // 2 steps then resume to 4 matches the uninterrupted run
  auto half = base;
  half.push_back("train.steps=2");
  half.push_back("train.schedule_steps=4");
  const std::string run2 = dir_.str("run2");
  ASSERT_EQ(run_cli("train", run2, half).code, 0);
  auto resume = base;
  resume.push_back("train.steps=4");
  resume.push_back("train.resume=" + run2 + "/checkpoint.bin");
  auto r = run_cli("train", run2, resume);
  ASSERT_EQ(r.code, 0) << r.err;
  // the embedded config differs by the resume key, the state must not
  auto resumed = Checkpoint::load(run2 + "/checkpoint.bin");
  auto straight = Checkpoint::load(run1 + "/checkpoint.bin");
  resumed.config_json = straight.config_json;
  EXPECT_EQ(resumed.serialize(), straight.serialize());
  EXPECT_EQ(slurp(fs::path(run2) / "train_log.jsonl"), slurp(fs::path(run1) / "train_log.jsonl"));

  auto ev = run_cli("eval", dir_.str("ev"), {"run.checkpoint=" + run1 + "/checkpoint.bin", "data.root=" + corpus_});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_TRUE(fs::exists(dir_.str("ev/metrics.jsonl")));
}

TEST_F(Cli, AnalyzeWritesReports) {
  const std::string out = dir_.str("an");
  auto r = run_cli("analyze", out, {"analyze.clean=" + corpus_ + "/clean", "analyze.degraded=" + corpus_ + "/degraded",
                                    "analyze.swap_bands=LL"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(fs::path(out) / "img_0001_energy.json"));
  EXPECT_TRUE(fs::exists(fs::path(out) / "img_0001_swap_clean.png"));
  EXPECT_TRUE(fs::exists(fs::path(out) / "manifest.json"));
}

TEST(CliGradCheck, TinyConfigPasses) {
  auto checks = network_grad_check(ModelConfig::tiny(), 16, 1e-3, 6, 0);
  ASSERT_FALSE(checks.empty());
  for (const auto& c : checks) EXPECT_TRUE(c.report.passed) << c.name << ": " << c.report.summary();
}

}  // namespace
}  // namespace swformer::cli
