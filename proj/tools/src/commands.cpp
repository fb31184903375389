#include "swformer_cli/commands.hpp"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "swformer/analysis.hpp"
#include "swformer/checkpoint.hpp"
#include "swformer/data.hpp"
#include "swformer/image_io.hpp"
#include "swformer/objective.hpp"
#include "swformer/train.hpp"
#include "swformer/version.hpp"

namespace swformer::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kCommands{"train", "eval", "infer", "analyze", "gradcheck", "make-corpus"};

void append(std::vector<std::string>& dst, const std::vector<std::string>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw IoError(path.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError(path.string() + ": rename failed: " + ec.message());
}

fs::path require_out(const RunOptions& opt) {
  if (opt.out.empty()) throw ConfigError("--out is required");
  std::error_code ec;
  fs::create_directories(opt.out, ec);
  if (ec) throw IoError(opt.out + ": cannot create output directory: " + ec.message());
  return fs::path(opt.out);
}

std::string manifest(const std::string& command, const FlatConfig& cfg, const json& extra = json::object()) {
  json j = {{"command", command},
            {"config_hash", cfg.hash()},
            {"seed", cfg.get_int("seed", 0)},
            {"versions", {{"swformer", kVersion}, {"checkpoint_format", kCheckpointVersion}}}};
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j.dump(2) + "\n";
}

void write_run_files(const fs::path& out, const std::string& command, const FlatConfig& cfg,
                     const json& extra = json::object()) {
  write_text(out / "config.json", cfg.to_json());
  write_text(out / "manifest.json", manifest(command, cfg, extra));
}

// Single PNG or every PNG in a directory, sorted by stem.
std::map<std::string, fs::path> png_inputs(const std::string& where, const std::string& key) {
  if (where.empty()) throw ConfigError(key + " is required");
  std::error_code ec;
  std::map<std::string, fs::path> out;
  if (fs::is_regular_file(where, ec)) {
    out[fs::path(where).stem().string()] = where;
    return out;
  }
  if (!fs::is_directory(where, ec)) throw IoError(where + ": no such file or directory");
  for (const auto& e : fs::directory_iterator(where)) {
    if (e.is_regular_file() && e.path().extension() == ".png") out[e.path().stem().string()] = e.path();
  }
  if (out.empty()) throw IoError(where + ": no PNG files found");
  return out;
}

template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), std::max<std::size_t>(n, 1));
  if (k <= 1) {
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

FlatConfig model_section(const FlatConfig& cfg) { return cfg.section("model."); }

// Model config from a checkpoint's embedded config, with explicit model.*
// keys from the run layered on top.
struct LoadedModel {
  ModelConfig config;
  std::unique_ptr<SWFormerNet<float>> net;
};

LoadedModel load_model(const FlatConfig& cfg) {
  LoadedModel m;
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  const std::string ckpt_path = cfg.get("run.checkpoint", "");
  if (ckpt_path.empty()) {
    m.config = ModelConfig::from_flat(cfg);
    m.net = std::make_unique<SWFormerNet<float>>(m.config, seed);
    return m;
  }
  const auto ckpt = Checkpoint::load(ckpt_path);
  auto stored = FlatConfig::parse_json(ckpt.config_json).section("model.");
  stored.merge(model_section(cfg));
  m.config = ModelConfig::from_flat(stored);
  m.config.zero_init_heads = false;
  m.net = std::make_unique<SWFormerNet<float>>(m.config, ckpt.seed);
  restore<float>(*m.net, ckpt);
  return m;
}

std::optional<Variant> run_variant(const FlatConfig& cfg) {
  if (!cfg.has("run.variant")) return std::nullopt;
  return parse_variant(cfg.get("run.variant", ""));
}

int cmd_make_corpus(const RunOptions& opt, const FlatConfig& cfg, std::ostream& out) {
  const auto dir = require_out(opt);
  const auto n = cfg.get_int("data.n_images", 8);
  const auto size = cfg.get_int("data.size", 64);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  std::vector<DegradationSpec> specs;
  std::stringstream kinds(cfg.get("data.kinds", "rain_streaks"));
  std::string kind;
  while (std::getline(kinds, kind, ',')) {
    if (kind.empty()) continue;
    auto spec = DegradationSpec::from_flat(cfg, "data.degradation.");
    spec.kind = parse_degradation(kind);
    spec.validate();
    specs.push_back(spec);
  }
  const auto samples = make_corpus(n, size, specs, seed, opt.workers);
  save_corpus(dir.string(), samples, manifest("make-corpus", cfg, {{"images", samples.size()}}));
  write_text(dir / "config.json", cfg.to_json());
  out << json({{"command", "make-corpus"}, {"images", samples.size()}, {"out", dir.string()}}).dump() << "\n";
  return kExitOk;
}

int cmd_train(const RunOptions& opt, const FlatConfig& cfg, std::ostream& out) {
  const auto dir = require_out(opt);
  const auto root = cfg.get("data.root", "");
  if (root.empty()) throw ConfigError("data.root is required");
  const auto corpus = load_corpus(root, opt.workers);
  const auto model_cfg = ModelConfig::from_flat(cfg);
  auto train_cfg = TrainConfig::from_flat(cfg);
  train_cfg.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  const auto loss_cfg = LossConfig::from_flat(cfg);
  const auto log_every = cfg.get_int("train.log_every", 1);
  const auto ckpt_every = cfg.get_int("train.checkpoint_every", 0);
  if (log_every < 1) throw ConfigError("train.log_every must be >= 1");
  if (ckpt_every < 0) throw ConfigError("train.checkpoint_every must be >= 0");

  SWFormerNet<float> net(model_cfg, train_cfg.seed);
  Trainer trainer(net, corpus, train_cfg, loss_cfg);
  const std::string resume = cfg.get("train.resume", "");
  if (!resume.empty()) trainer.resume(Checkpoint::load(resume));

  write_run_files(dir, "train", cfg);
  const fs::path log_path = dir / "train_log.jsonl";
  std::ofstream log(log_path, resume.empty() ? std::ios::trunc : std::ios::app);
  if (!log) throw IoError(log_path.string() + ": cannot open for writing");
  const std::string cfg_json = cfg.to_json();
  const fs::path ckpt_path = dir / "checkpoint.bin";

  StepRecord last;
  trainer.run(train_cfg.steps, [&](const StepRecord& r) {
    last = r;
    if (r.step % log_every == 0 || r.step + 1 == train_cfg.steps) log << r.to_json() << "\n" << std::flush;
    if (ckpt_every > 0 && (r.step + 1) % ckpt_every == 0) trainer.checkpoint(cfg_json).save(ckpt_path.string());
  });
  if (!log) throw IoError(log_path.string() + ": write failed");
  trainer.checkpoint(cfg_json).save(ckpt_path.string());
  const auto report = evaluate(net, corpus);
  out << json({{"command", "train"},
               {"steps", trainer.current_step()},
               {"loss", last.loss},
               {"train_psnr", std::isinf(report.mean_psnr) ? json("inf") : json(report.mean_psnr)},
               {"checkpoint", ckpt_path.string()}})
             .dump()
      << "\n";
  return kExitOk;
}

int cmd_eval(const RunOptions& opt, const FlatConfig& cfg, std::ostream& out) {
  const auto dir = require_out(opt);
  std::vector<PairedSample> pairs;
  if (cfg.has("eval.degraded") || cfg.has("eval.clean")) {
    pairs = load_paired_folder(cfg.get("eval.degraded", ""), cfg.get("eval.clean", ""), opt.workers);
  } else {
    const auto root = cfg.get("data.root", "");
    if (root.empty()) throw ConfigError("eval needs data.root or eval.degraded and eval.clean");
    pairs = load_corpus(root, opt.workers);
  }
  const bool y = cfg.get_bool("eval.y_channel", false);
  const auto luma_name = cfg.get("eval.luma", "full");
  if (luma_name != "full" && luma_name != "studio") throw ConfigError("eval.luma must be full or studio");
  const LumaRange luma = luma_name == "studio" ? LumaRange::kStudio : LumaRange::kFull;

  std::unique_ptr<SWFormerNet<float>> net;
  std::optional<Variant> variant = run_variant(cfg);
  if (cfg.has("run.checkpoint")) {
    net = load_model(cfg).net;
    net->set_training(false);
  }
  std::vector<ImageMetric> metrics(pairs.size());
  parallel_for(pairs.size(), opt.workers, [&](std::size_t i) {
    Tensor<float> restored = pairs[i].degraded;
    if (net) {
      NoGradGuard guard;
      auto images = net->restore(pairs[i].degraded, variant);
      restored = *images[exit_level(variant.value_or(net->config().variant))];
      restored = quantize8(restored);
    }
    metrics[i] = evaluate_pair(pairs[i].id, restored, pairs[i].clean, y, luma);
  });
  MetricReport report;
  report.y_channel = y;
  for (auto& m : metrics) report.add(std::move(m));
  write_text(dir / "metrics.jsonl", report.to_jsonl());
  write_run_files(dir, "eval", cfg);
  out << report.to_jsonl().substr(report.to_jsonl().rfind('{'));
  return kExitOk;
}

int cmd_infer(const RunOptions& opt, const FlatConfig& cfg, std::ostream& out) {
  const auto dir = require_out(opt);
  const auto inputs = png_inputs(cfg.get("infer.input", ""), "infer.input");
  auto model = load_model(cfg);
  auto& net = *model.net;
  net.set_training(false);
  const auto variant = run_variant(cfg);
  std::vector<std::pair<std::string, fs::path>> items(inputs.begin(), inputs.end());
  const char* exit_names[3] = {"l", "m", "s"};  // by pyramid level
  std::set<std::string> written;
  std::mutex mu;
  parallel_for(items.size(), opt.workers, [&](std::size_t i) {
    const auto image = read_png(items[i].second.string());
    std::array<std::optional<Tensor<float>>, 3> images;
    {
      NoGradGuard guard;
      images = net.restore(image, variant);
    }
    for (int k = 0; k < 3; ++k) {
      if (!images[k]) continue;
      const fs::path sub = dir / exit_names[k];
      {
        std::lock_guard<std::mutex> lock(mu);
        fs::create_directories(sub);
        written.insert(exit_names[k]);
      }
      write_png((sub / (items[i].first + ".png")).string(), *images[k]);
    }
  });
  write_run_files(dir, "infer", cfg);
  out << json({{"command", "infer"}, {"images", items.size()}, {"exits", written}}).dump() << "\n";
  return kExitOk;
}

int cmd_analyze(const RunOptions& opt, const FlatConfig& cfg, std::ostream& out) {
  const auto dir = require_out(opt);
  const auto clean = png_inputs(cfg.get("analyze.clean", ""), "analyze.clean");
  const auto degraded = png_inputs(cfg.get("analyze.degraded", ""), "analyze.degraded");
  std::vector<std::string> orphans;
  for (const auto& [stem, p] : clean) {
    if (degraded.count(stem) == 0) orphans.push_back(p.string());
  }
  for (const auto& [stem, p] : degraded) {
    if (clean.count(stem) == 0) orphans.push_back(p.string());
  }
  if (!orphans.empty() && !(clean.size() == 1 && degraded.size() == 1)) {
    std::string msg = "unmatched files:";
    for (const auto& o : orphans) msg += " " + o + ";";
    throw IngestionError(msg);
  }
  std::vector<std::tuple<std::string, fs::path, fs::path>> items;
  if (clean.size() == 1 && degraded.size() == 1) {
    items.emplace_back(degraded.begin()->first, clean.begin()->second, degraded.begin()->second);
  } else {
    for (const auto& [stem, p] : clean) items.emplace_back(stem, p, degraded.at(stem));
  }
  const bool swap = cfg.has("analyze.swap_bands");
  std::set<Band> bands;
  if (swap) {
    std::stringstream ss(cfg.get("analyze.swap_bands", ""));
    std::string b;
    while (std::getline(ss, b, ',')) {
      if (b.empty()) continue;
      bool found = false;
      for (Band band : kAllBands) {
        if (b == band_name(band)) {
          bands.insert(band);
          found = true;
        }
      }
      if (!found) throw ConfigError("analyze.swap_bands: unknown band '" + b + "' (expected LL, LH, HL, HH)");
    }
  }
  std::vector<std::string> warnings(items.size());
  parallel_for(items.size(), opt.workers, [&](std::size_t i) {
    const auto& [id, clean_path, degraded_path] = items[i];
    const auto c = read_png(clean_path.string());
    const auto d = read_png(degraded_path.string());
    write_report(dir.string(), id, analyze_pair(c, d));
    if (swap) {
      auto r = swap_subbands(c, d, bands);
      write_png((dir / (id + "_swap_clean.png")).string(), r.a);
      write_png((dir / (id + "_swap_degraded.png")).string(), r.b);
      if (!r.warnings.empty()) warnings[i] = r.warnings.front();
    }
  });
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!warnings[i].empty()) out << json({{"warning", warnings[i]}, {"id", std::get<0>(items[i])}}).dump() << "\n";
  }
  write_run_files(dir, "analyze", cfg);
  out << json({{"command", "analyze"}, {"pairs", items.size()}}).dump() << "\n";
  return kExitOk;
}

int cmd_gradcheck(const RunOptions& opt, const FlatConfig& cfg, std::ostream& out) {
  const auto dir = require_out(opt);
  const auto model_cfg = ModelConfig::from_flat(cfg);
  const double tol = cfg.get_double("gradcheck.tol", 1e-3);
  const auto size = cfg.get_int("gradcheck.size", 16);
  const auto entries = cfg.get_int("gradcheck.max_entries", 4);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  const auto results = network_grad_check(model_cfg, size, tol, entries, seed);
  std::string lines;
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.report.passed;
    lines +=
        json({{"block", r.name}, {"passed", r.report.passed}, {"worst_rel", r.report.worst()}, {"tol", tol}}).dump() +
        "\n";
  }
  write_text(dir / "gradcheck.jsonl", lines);
  write_run_files(dir, "gradcheck", cfg);
  out << lines;
  return ok ? kExitOk : kExitGradCheck;
}

// Group name of a parameter: "stage1.0" style for blocks, else the first
// path component.
std::string group_of(const std::string& name) {
  const auto dot = name.find('.');
  const std::string head = name.substr(0, dot);
  if (head.rfind("stage", 0) == 0 && dot != std::string::npos) {
    const auto dot2 = name.find('.', dot + 1);
    return name.substr(0, dot2);
  }
  return head;
}

Tensor<double> random_tensor(Shape s, Rng& rng, double scale = 1.0) {
  auto t = Tensor<double>::zeros(s);
  for (auto& v : t.data()) v = scale * rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace

std::vector<std::string> allowed_keys(const std::string& command) {
  std::vector<std::string> keys{"seed"};
  const auto model = ModelConfig::flat_keys();
  if (command == "make-corpus") {
    append(keys, {"data.n_images", "data.size", "data.kinds"});
    append(keys, DegradationSpec::flat_keys("data.degradation."));
  } else if (command == "train") {
    append(keys, model);
    append(keys, LossConfig::flat_keys());
    append(keys, TrainConfig::flat_keys());
    append(keys, {"data.root", "train.resume", "train.log_every", "train.checkpoint_every"});
  } else if (command == "eval") {
    append(keys, model);
    append(keys, {"run.checkpoint", "run.variant", "data.root", "eval.degraded", "eval.clean", "eval.y_channel",
                  "eval.luma"});
  } else if (command == "infer") {
    append(keys, model);
    append(keys, {"run.checkpoint", "run.variant", "infer.input"});
  } else if (command == "analyze") {
    append(keys, {"analyze.clean", "analyze.degraded", "analyze.swap_bands"});
  } else if (command == "gradcheck") {
    append(keys, model);
    append(keys, {"gradcheck.tol", "gradcheck.size", "gradcheck.max_entries"});
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return keys;
}

FlatConfig effective_config(const RunOptions& opt) {
  if (kCommands.count(opt.command) == 0) throw ConfigError("unknown command '" + opt.command + "'");
  FlatConfig cfg;
  if (opt.command == "gradcheck") cfg.set("model.preset", "tiny");
  if (!opt.config_path.empty()) cfg.merge(FlatConfig::load(opt.config_path));
  for (const auto& o : opt.overrides) cfg.apply_override(o);
  if (opt.seed) cfg.set("seed", std::to_string(*opt.seed));
  if (opt.variant) {
    parse_variant(*opt.variant);
    cfg.set(opt.command == "train" || opt.command == "gradcheck" ? "model.variant" : "run.variant", *opt.variant);
  }
  cfg.reject_unknown(allowed_keys(opt.command));
  if (!cfg.has("seed")) cfg.set("seed", "0");
  (void)cfg.get_int("seed", 0);  // validates the value

  // Spell out every default so the echoed config reproduces the run.
  const bool has_model = opt.command == "train" || opt.command == "gradcheck" ||
                         ((opt.command == "infer" || opt.command == "eval") && !cfg.has("run.checkpoint"));
  if (has_model) {
    cfg.merge(ModelConfig::from_flat(cfg).to_flat());
    auto values = cfg.values();
    values.erase("model.preset");
    cfg = FlatConfig(values);
  }
  if (opt.command == "train") {
    cfg.merge(LossConfig::from_flat(cfg).to_flat());
    cfg.merge(TrainConfig::from_flat(cfg).to_flat());
  }
  if (opt.command == "make-corpus") {
    const auto spec = DegradationSpec::from_flat(cfg, "data.degradation.").to_flat("data.degradation.");
    for (const auto& [k, v] : spec.values()) {
      if (k != "data.degradation.kind" && !cfg.has(k)) cfg.set(k, v);
    }
  }
  return cfg;
}

std::vector<BlockGradCheck> network_grad_check(const ModelConfig& cfg, std::int64_t size, double tol,
                                               std::int64_t max_entries, std::uint64_t seed) {
  std::vector<BlockGradCheck> out;
  Rng rng = Rng::derive(seed, 0x67726164);
  const GradCheckOptions gopt{.step = 1e-4, .max_entries = max_entries, .seed = seed};
  {
    Rng init(seed);
    SWFormerBlock<double> block(cfg.width, cfg.block, init);
    const auto x = random_tensor(Shape{1, cfg.width, 8, 8}, rng);
    const auto w = random_tensor(Shape{1, cfg.width, 8, 8}, rng);
    auto f = [&] { return mean(mul(block.forward(x), w)); };
    out.push_back({"block", grad_check(f, block.named_parameters(), tol, gopt)});
  }
  SWFormerNet<double> net(cfg, seed);
  const auto image = random_tensor(Shape{1, cfg.in_channels, size, size}, rng, 0.5);
  auto pyramid = decompose_input(image, cfg.inter_block);
  std::array<Tensor<double>, 3> weights;
  for (int k = 0; k < 3; ++k) {
    if (pyramid.levels[k].defined()) weights[k] = random_tensor(pyramid.levels[k].shape(), rng);
  }
  auto f = [&] {
    auto o = net.forward(pyramid);
    Tensor<double> total;
    for (int k = 0; k < 3; ++k) {
      if (!o.levels[k]) continue;
      auto term = mean(mul(*o.levels[k], weights[k]));
      total = total.defined() ? add(total, term) : term;
    }
    return total;
  };
  const auto params = net.named_parameters();
  const auto report = grad_check(f, params, tol, gopt);
  std::map<std::string, std::size_t> index;
  std::vector<BlockGradCheck> groups;
  for (const auto& e : report.entries) {
    const auto g = group_of(e.name);
    auto it = index.find(g);
    if (it == index.end()) {
      it = index.emplace(g, groups.size()).first;
      groups.push_back({"network." + g, GradCheckReport{{}, tol, true}});
    }
    auto& r = groups[it->second].report;
    r.entries.push_back(e);
    r.passed = r.passed && e.passed;
  }
  out.insert(out.end(), groups.begin(), groups.end());
  return out;
}

int run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  auto fail = [&](const char* kind, const std::string& message, int code) {
    err << json({{"error", kind}, {"message", message}, {"exit_code", code}}).dump() << "\n";
    return code;
  };
  try {
    const auto cfg = effective_config(opt);
    if (opt.command == "make-corpus") return cmd_make_corpus(opt, cfg, out);
    if (opt.command == "train") return cmd_train(opt, cfg, out);
    if (opt.command == "eval") return cmd_eval(opt, cfg, out);
    if (opt.command == "infer") return cmd_infer(opt, cfg, out);
    if (opt.command == "analyze") return cmd_analyze(opt, cfg, out);
    return cmd_gradcheck(opt, cfg, out);
  } catch (const ConfigError& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const UsageError& e) {
    return fail("usage", e.what(), kExitConfig);
  } catch (const IngestionError& e) {
    return fail("ingestion", e.what(), kExitIo);
  } catch (const IoError& e) {
    return fail("io", e.what(), kExitIo);
  } catch (const fs::filesystem_error& e) {
    return fail("io", e.what(), kExitIo);
  } catch (const NumericError& e) {
    return fail("numeric", e.what(), kExitNumeric);
  } catch (const DimensionError& e) {
    return fail("dimension", e.what(), kExitOther);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitOther);
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"SWFormer image restoration: train, evaluate, infer and analyze"};
  app.require_subcommand(1);
  RunOptions opt;
  std::uint64_t seed = 0;
  std::string variant;
  for (const char* name : {"train", "eval", "infer", "analyze", "gradcheck", "make-corpus"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "JSON file of dotted keys");
    sub->add_option("--set", opt.overrides, "key=value override, repeatable")->allow_extra_args(false);
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--variant", variant, "exit variant: s, m or l")->check(CLI::IsMember({"s", "m", "l"}));
    sub->add_option("--workers", opt.workers, "worker threads for per-image work")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json({{"error", "usage"}, {"message", e.what()}, {"exit_code", int(kExitConfig)}}).dump() << "\n";
    return kExitConfig;
  }
  for (auto* sub : app.get_subcommands()) {
    opt.command = sub->get_name();
    if (sub->count("--seed") > 0) opt.seed = seed;
    if (sub->count("--variant") > 0) opt.variant = variant;
  }
  return run(opt, std::cout, std::cerr);
}

}  // namespace swformer::cli
