#include "swformer/train.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace swformer {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Target pyramid for a batch of clean images, aligned with the network outputs.
std::array<std::optional<Tensor<float>>, 3> targets_for(const Tensor<float>& clean, InterBlock mode) {
  auto g = decompose_input(clean, mode);
  std::array<std::optional<Tensor<float>>, 3> out;
  for (int k = 0; k < 3; ++k) {
    if (g.levels[k].defined()) out[k] = g.levels[k];
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (steps < 0) throw ConfigError("train.steps must be >= 0");
  if (batch < 1) throw ConfigError("train.batch must be >= 1");
  if (patch < 8) throw ConfigError("train.patch must be >= 8");
  if (!(lr_init > 0) || !(lr_min >= 0) || lr_min > lr_init) {
    throw ConfigError("train.lr_init and train.lr_min need 0 <= lr_min <= lr_init, lr_init > 0");
  }
  if (schedule_steps < 0) throw ConfigError("train.schedule_steps must be >= 0");
  if (!(weight_decay >= 0)) throw ConfigError("train.weight_decay must be >= 0");
  if (!(clip_norm >= 0)) throw ConfigError("train.clip_norm must be >= 0");
}

CosineSchedule TrainConfig::schedule() const {
  return CosineSchedule{lr_init, lr_min, schedule_steps > 0 ? schedule_steps : std::max<std::int64_t>(steps, 1)};
}

std::vector<std::string> TrainConfig::flat_keys() {
  return {"train.steps",          "train.batch",        "train.patch",     "train.lr_init", "train.lr_min",
          "train.schedule_steps", "train.weight_decay", "train.clip_norm"};
}

FlatConfig TrainConfig::to_flat() const {
  FlatConfig f;
  f.set("train.steps", std::to_string(steps));
  f.set("train.batch", std::to_string(batch));
  f.set("train.patch", std::to_string(patch));
  f.set("train.lr_init", num(lr_init));
  f.set("train.lr_min", num(lr_min));
  f.set("train.schedule_steps", std::to_string(schedule_steps));
  f.set("train.weight_decay", num(weight_decay));
  f.set("train.clip_norm", num(clip_norm));
  return f;
}

TrainConfig TrainConfig::from_flat(const FlatConfig& cfg) {
  TrainConfig t;
  t.steps = cfg.get_int("train.steps", t.steps);
  t.batch = cfg.get_int("train.batch", t.batch);
  t.patch = cfg.get_int("train.patch", t.patch);
  t.lr_init = cfg.get_double("train.lr_init", t.lr_init);
  t.lr_min = cfg.get_double("train.lr_min", t.lr_min);
  t.schedule_steps = cfg.get_int("train.schedule_steps", t.schedule_steps);
  t.weight_decay = cfg.get_double("train.weight_decay", t.weight_decay);
  t.clip_norm = cfg.get_double("train.clip_norm", t.clip_norm);
  t.validate();
  return t;
}

std::string StepRecord::to_json() const {
  nlohmann::json j = {{"step", step},       {"lr", lr},           {"loss", loss},
                      {"spatial", spatial}, {"wavelet", wavelet}, {"fourier", fourier}};
  return j.dump();
}

Trainer::Trainer(SWFormerNet<float>& net, const std::vector<PairedSample>& corpus, TrainConfig cfg, LossConfig loss)
    : net_(&net),
      cfg_((cfg.validate(), cfg)),
      loss_(loss),
      sampler_(corpus, cfg.patch, cfg.batch, cfg.seed),
      opt_(net.named_parameters(), AdamWConfig{.weight_decay = cfg.weight_decay}) {
  loss_.validate();
}

StepRecord Trainer::step() {
  const std::int64_t t = step_;
  const double lr = cfg_.schedule().lr(t);
  const auto b = sampler_.batch(t);
  net_->set_training(true);
  net_->zero_grad();
  active_tape<float>().clear();
  auto pyramid = decompose_input(b.degraded, net_->config().inter_block);
  auto out = net_->forward(pyramid);
  auto terms = multi_domain_loss(out.levels, targets_for(b.clean, net_->config().inter_block), loss_);
  StepRecord r{t, lr, terms.total.item(), terms.spatial.item(), terms.wavelet.item(), terms.fourier.item()};
  if (!std::isfinite(r.loss)) {
    active_tape<float>().clear();
    throw NumericError("non-finite loss at step " + std::to_string(t));
  }
  backward(terms.total);
  if (cfg_.clip_norm > 0) opt_.clip_grad_norm(cfg_.clip_norm);
  opt_.step(lr);
  net_->zero_grad();
  ++step_;
  return r;
}

TrainingLog Trainer::run(std::int64_t until, const std::function<void(const StepRecord&)>& on_step) {
  if (until < 0) until = cfg_.steps;
  TrainingLog log;
  while (step_ < until) {
    log.records.push_back(step());
    if (on_step) on_step(log.records.back());
  }
  return log;
}

Checkpoint Trainer::checkpoint(const std::string& config_json) const {
  return capture<float>(*net_, config_json, cfg_.seed, &opt_);
}

void Trainer::resume(const Checkpoint& ckpt) {
  restore<float>(*net_, ckpt);
  if (!ckpt.optimizer) throw UsageError("checkpoint has no optimizer state to resume from");
  restore<float>(opt_, *ckpt.optimizer);
  step_ = ckpt.optimizer->step;
}

TrainingLog train(SWFormerNet<float>& net, const std::vector<PairedSample>& corpus, const LossConfig& loss,
                  const TrainConfig& cfg) {
  if (cfg.steps == 0) return {};
  Trainer trainer(net, corpus, cfg, loss);
  return trainer.run();
}

Tensor<float> restore_image(SWFormerNet<float>& net, const Tensor<float>& image, std::optional<Variant> variant) {
  NoGradGuard guard;
  const bool was_training = net.training();
  net.set_training(false);
  auto images = net.restore(image, variant);
  net.set_training(was_training);
  const int level = exit_level(variant.value_or(net.config().variant));
  if (!images[level]) throw UsageError("no output at pyramid level " + std::to_string(level));
  return *images[level];
}

MetricReport evaluate(SWFormerNet<float>& net, const std::vector<PairedSample>& pairs, bool y_channel,
                      std::optional<Variant> variant) {
  MetricReport report;
  report.y_channel = y_channel;
  for (const auto& p : pairs) {
    auto restored = restore_image(net, p.degraded, variant);
    for (auto& v : restored.data()) v = std::clamp(v, 0.0f, 1.0f);
    report.add(evaluate_pair(p.id, restored, p.clean, y_channel));
  }
  return report;
}

}  // namespace swformer
