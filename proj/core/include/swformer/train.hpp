#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swformer/checkpoint.hpp"
#include "swformer/data.hpp"
#include "swformer/network.hpp"
#include "swformer/objective.hpp"
#include "swformer/optim.hpp"

namespace swformer {

struct TrainConfig {
  std::int64_t steps = 1000;
  std::int64_t batch = 4;
  std::int64_t patch = 32;
  std::uint64_t seed = 0;
  double lr_init = 1e-3;
  double lr_min = 1e-6;
  std::int64_t schedule_steps = 0;  // cosine period T; 0 means `steps`
  double weight_decay = 0.0;
  double clip_norm = 0.0;  // 0 disables clipping

  void validate() const;
  [[nodiscard]] CosineSchedule schedule() const;
  [[nodiscard]] FlatConfig to_flat() const;  // keys under "train."
  static TrainConfig from_flat(const FlatConfig& cfg);
  static std::vector<std::string> flat_keys();
};

struct StepRecord {
  std::int64_t step = 0;
  double lr = 0;
  double loss = 0;
  double spatial = 0;
  double wavelet = 0;
  double fourier = 0;

  [[nodiscard]] std::string to_json() const;  // one line, no newline
};

struct TrainingLog {
  std::vector<StepRecord> records;
};

class Trainer {
 public:
  Trainer(SWFormerNet<float>& net, const std::vector<PairedSample>& corpus, TrainConfig cfg, LossConfig loss = {});

  // One optimizer step at the current step index, which then advances.
  StepRecord step();
  // Runs until `until` steps have been taken in total (cfg.steps by default).
  TrainingLog run(std::int64_t until = -1, const std::function<void(const StepRecord&)>& on_step = {});

  [[nodiscard]] std::int64_t current_step() const { return step_; }
  [[nodiscard]] AdamW<float>& optimizer() { return opt_; }
  [[nodiscard]] const TrainConfig& config() const { return cfg_; }

  [[nodiscard]] Checkpoint checkpoint(const std::string& config_json) const;
  // Restores weights, buffers and optimizer state; the step index resumes
  // from the optimizer step count.
  void resume(const Checkpoint& ckpt);

 private:
  SWFormerNet<float>* net_;
  TrainConfig cfg_;
  LossConfig loss_;
  PatchSampler sampler_;
  AdamW<float> opt_;
  std::int64_t step_ = 0;
};

TrainingLog train(SWFormerNet<float>& net, const std::vector<PairedSample>& corpus, const LossConfig& loss,
                  const TrainConfig& cfg);

// Full-image restoration at the finest exit of `variant`, in eval mode.
Tensor<float> restore_image(SWFormerNet<float>& net, const Tensor<float>& image,
                            std::optional<Variant> variant = std::nullopt);

MetricReport evaluate(SWFormerNet<float>& net, const std::vector<PairedSample>& pairs, bool y_channel = false,
                      std::optional<Variant> variant = std::nullopt);

}  // namespace swformer
